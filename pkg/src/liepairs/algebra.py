"""Quadratic Lie algebras: bracket, invariant form and compatible involution.

An algebra is stored in a fixed ordered basis ``b_0, ..., b_{d-1}`` as dense
structure constants ``c[i, j, k]`` with ``[b_i, b_j] = sum_k c[i, j, k] b_k``.
The inner product used everywhere is ``<x, y> = -form(theta x, y)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import CatalogError, ValidationError
from .linalg import numerical_kernel, orthonormalize


def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuadraticLieAlgebra:
    """Finite-dimensional real Lie algebra with invariant form and involution."""

    bracket: np.ndarray
    form: np.ndarray
    involution: np.ndarray
    label: str = "algebra"
    gram: np.ndarray | None = None
    cartan: np.ndarray | None = None  # columns span a theta-invariant Cartan subalgebra

    def __post_init__(self):
        c = np.asarray(self.bracket, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError(f"bracket must be a cubic d x d x d tensor, got {c.shape}")
        object.__setattr__(self, "bracket", _frozen(c))
        object.__setattr__(self, "form", _frozen(self.form))
        object.__setattr__(self, "involution", _frozen(self.involution))
        gram = self.gram
        if gram is None:
            gram = -self.involution.T @ self.form
        object.__setattr__(self, "gram", _frozen(gram))
        if self.cartan is not None:
            object.__setattr__(self, "cartan", _frozen(np.reshape(self.cartan, (c.shape[0], -1))))

    @property
    def dim(self) -> int:
        return self.bracket.shape[0]

    def br(self, x, y):
        """Bracket of two coordinate vectors."""
        return np.einsum("i,j,ijk->k", x, y, self.bracket)

    def inner(self, x, y):
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def norm(self, x):
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def theta(self, x):
        return self.involution @ x

    def gram_root(self):
        """Matrix ``R`` with ``R.T @ R = gram``; ``R @ x`` gives orthonormal coordinates."""
        return np.linalg.cholesky(self.gram).T

    def p_basis(self):
        """Gram-orthonormal basis (columns) of the -1 eigenspace of theta."""
        return self._eigenspace(-1.0)

    def k_basis(self):
        """Gram-orthonormal basis (columns) of the +1 eigenspace of theta."""
        return self._eigenspace(1.0)

    def _eigenspace(self, sign):
        proj = (np.eye(self.dim) + sign * self.involution) / 2
        return orthonormalize(proj, self.gram)

    def __repr__(self):
        return f"QuadraticLieAlgebra({self.label!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of the columns of ``basis`` inside an ambient algebra."""

    basis: np.ndarray
    ambient: QuadraticLieAlgebra = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(self.ambient.dim, -1)
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def is_valid(self, tol=1e-10) -> bool:
        if self.dim == 0:
            return True
        norms = np.linalg.norm(self.basis, axis=0)
        if np.any(norms == 0):
            return False
        s = np.linalg.svd(self.basis / norms, compute_uv=False)
        return bool(s[-1] > tol)

    def orthonormal(self):
        """Same subspace with a gram-orthonormal basis."""
        return Subspace(orthonormalize(self.basis, self.ambient.gram), self.ambient)

    def projector(self):
        """Gram-orthogonal projector onto the subspace, in ambient coordinates."""
        q = orthonormalize(self.basis, self.ambient.gram)
        return q @ q.T @ self.ambient.gram

    def as_algebra(self, label=None, tol=1e-8, return_basis=False):
        """Restrict bracket, form and involution to this subspace.

        The subspace must be a theta-invariant subalgebra; the returned
        algebra uses a gram-orthonormal basis of it, which is also returned
        (as ambient-coordinate columns) when ``return_basis`` is set.
        """
        amb = self.ambient
        q = orthonormalize(self.basis, amb.gram)
        r = q.shape[1]
        coef = q.T @ amb.gram  # coordinates of ambient vectors in the basis q
        c = np.zeros((r, r, r))
        closure = 0.0
        for i, j in iproduct(range(r), repeat=2):
            z = amb.br(q[:, i], q[:, j])
            c[i, j] = coef @ z
            closure = max(closure, float(np.linalg.norm(z - q @ c[i, j])))
        scale = max(1.0, float(np.max(np.abs(amb.bracket))) if amb.dim else 1.0)
        c[np.abs(c) < 1e-13 * scale] = 0.0
        theta = coef @ amb.involution @ q
        theta_leak = float(np.linalg.norm(amb.involution @ q - q @ theta)) if r else 0.0
        if closure > tol * scale:
            raise ValidationError(f"subspace is not closed under the bracket (residual {closure:.2e})")
        if theta_leak > tol:
            raise ValidationError(f"subspace is not theta-invariant (residual {theta_leak:.2e})")
        sub = QuadraticLieAlgebra(
            bracket=c,
            form=q.T @ amb.form @ q,
            involution=theta,
            label=label or f"sub({amb.label})",
        )
        return (sub, q) if return_basis else sub


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict
    tolerance: float
    ok: bool

    def failures(self):
        return [name for name, (value, passed) in self.residuals.items() if not passed]


def killing_form(bracket):
    """``B[i, j] = trace(ad_{b_i} ad_{b_j})`` for a structure tensor."""
    c = np.asarray(bracket, dtype=float)
    # (ad_{b_i})[k, l] = c[i, l, k]
    out = np.einsum("ilk,jkl->ij", c, c)
    return (out + out.T) / 2


def adjoint(alg: QuadraticLieAlgebra, v):
    """Matrix of ``x -> [v, x]``; column ``j`` holds ``[v, b_j]``."""
    return np.einsum("i,ijk->kj", np.asarray(v, dtype=float), alg.bracket)


def adjoint_maps(alg: QuadraticLieAlgebra):
    """Stack of ``ad_{b_i}`` for all basis vectors, shape (d, d, d)."""
    return np.transpose(alg.bracket, (0, 2, 1))


def centralizer(alg: QuadraticLieAlgebra, sub: Subspace, tol=1e-8) -> Subspace:
    """Numerical kernel of ``v -> ([v, s_1], ..., [v, s_m])``."""
    if sub.dim == 0:
        return Subspace(np.eye(alg.dim), alg)
    # [v, s] = -ad_s v
    rows = [adjoint(alg, sub.basis[:, i]) for i in range(sub.dim)]
    kernel, _ = numerical_kernel(np.vstack(rows), tol)
    return Subspace(orthonormalize(kernel, alg.gram), alg)


def validate_algebra(alg: QuadraticLieAlgebra, tol=1e-10) -> ValidationReport:
    """Residual of every structural invariant, relative where a scale exists."""
    c = alg.bracket
    d = alg.dim
    cmax = float(np.max(np.abs(c))) if c.size else 0.0
    # an abelian bracket has no intrinsic scale
    scale = cmax if cmax > 1e-12 else 1.0
    theta, beta, gram = alg.involution, alg.form, alg.gram
    res = {}

    res["antisymmetry"] = float(np.max(np.abs(c + np.transpose(c, (1, 0, 2))))) if d else 0.0
    res["jacobi"] = _jacobi_tensor_residual(c) / scale**2 if cmax > 0 else 0.0
    res["theta_involution"] = float(np.max(np.abs(theta @ theta - np.eye(d)))) if d else 0.0
    # theta [b_i, b_j] = [theta b_i, theta b_j]
    lhs = np.einsum("ijk,lk->ijl", c, theta)
    rhs = np.einsum("ai,bj,abk->ijk", theta, theta, c)
    tscale = scale * max(1.0, float(np.max(np.abs(theta)))) ** 2 if d else 1.0
    res["theta_automorphism"] = float(np.max(np.abs(lhs - rhs))) / tscale if d else 0.0
    bscale = max(float(np.max(np.abs(beta))), 1e-300) if d else 1.0
    res["form_symmetry"] = float(np.max(np.abs(beta - beta.T))) / bscale if d else 0.0
    # beta([b_i, b_j], b_k) + beta(b_j, [b_i, b_k])
    inv = np.einsum("ijl,lk->ijk", c, beta) + np.einsum("ikl,jl->ijk", c, beta)
    res["form_invariance"] = float(np.max(np.abs(inv))) / (bscale * scale) if d else 0.0
    gscale = max(float(np.max(np.abs(gram))), 1e-300) if d else 1.0
    res["gram_symmetry"] = float(np.max(np.abs(gram - gram.T))) / gscale if d else 0.0
    res["gram_consistency"] = float(np.max(np.abs(gram + theta.T @ beta))) / gscale if d else 0.0
    min_eig = float(np.min(np.linalg.eigvalsh((gram + gram.T) / 2))) if d else 1.0
    res["gram_min_eigenvalue"] = min_eig

    checked = {}
    for name, value in res.items():
        if name == "gram_min_eigenvalue":
            checked[name] = (value, value > tol * gscale)
        else:
            checked[name] = (value, value <= tol)
    ok = all(passed for _, passed in checked.values())
    return ValidationReport(checked, tol, ok)


def _jacobi_tensor_residual(c):
    # [b_i,[b_j,b_k]] + [b_j,[b_k,b_i]] + [b_k,[b_i,b_j]]
    t = np.einsum("jkl,ilm->ijkm", c, c)
    jac = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(jac))) if jac.size else 0.0


# ---------------------------------------------------------------------------
# catalog

def _from_matrices(mats, theta_fn, label, cartan_idx=()):
    """Build an algebra from a basis of matrices closed under commutators."""
    d = len(mats)
    flat = np.array([m.ravel() for m in mats]).T
    c = np.zeros((d, d, d))
    for i, j in iproduct(range(d), repeat=2):
        comm = mats[i] @ mats[j] - mats[j] @ mats[i]
        coef, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
        c[i, j] = coef
    c = _snap(c)
    theta = np.zeros((d, d))
    for j, m in enumerate(mats):
        coef, *_ = np.linalg.lstsq(flat, theta_fn(m).ravel(), rcond=None)
        theta[:, j] = coef
    theta = _snap(theta)
    cartan = None
    if cartan_idx:
        cartan = np.eye(d)[:, list(cartan_idx)]
    return QuadraticLieAlgebra(c, killing_form(c), theta, label=label, cartan=cartan)


def _snap(arr, tol=1e-12):
    # least-squares noise on exact integer structure data
    near = np.round(arr)
    return np.where(np.abs(arr - near) < tol, near, arr)


def sl_real(m: int) -> QuadraticLieAlgebra:
    """sl(m, R) with basis H_1..H_{m-1}, E_ij (i<j), E_ij (i>j); theta X = -X^T."""
    if m < 2:
        raise CatalogError("sl(m, R) needs m >= 2")
    return _from_matrices(sl_real_matrices(m), lambda x: -x.T, f"sl{m}R", cartan_idx=range(m - 1))


def sl_real_matrices(m: int):
    """The matrix basis used by :func:`sl_real`, in the same order."""
    mats = []
    for i in range(m - 1):
        h = np.zeros((m, m))
        h[i, i], h[i + 1, i + 1] = 1.0, -1.0
        mats.append(h)
    for upper in (True, False):
        for i, j in iproduct(range(m), repeat=2):
            if (i < j) if upper else (i > j):
                e = np.zeros((m, m))
                e[i, j] = 1.0
                mats.append(e)
    return mats


def su2() -> QuadraticLieAlgebra:
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k], c[j, i, k] = 1.0, -1.0
    return QuadraticLieAlgebra(c, killing_form(c), np.eye(3), label="su2", cartan=np.eye(3)[:, :1])


def so3() -> QuadraticLieAlgebra:
    mats = []
    for a, b in ((1, 2), (2, 0), (0, 1)):
        m = np.zeros((3, 3))
        m[a, b], m[b, a] = -1.0, 1.0
        mats.append(m)
    return _from_matrices(mats, lambda x: x.copy(), "so3", cartan_idx=(0,))


def direct_product(*factors: QuadraticLieAlgebra) -> QuadraticLieAlgebra:
    dims = [f.dim for f in factors]
    d = sum(dims)
    c = np.zeros((d, d, d))
    beta = np.zeros((d, d))
    theta = np.zeros((d, d))
    gram = np.zeros((d, d))
    cartans = []
    off = 0
    for f in factors:
        s = slice(off, off + f.dim)
        c[s, s, s] = f.bracket
        beta[s, s] = f.form
        theta[s, s] = f.involution
        gram[s, s] = f.gram
        if f.cartan is not None:
            block = np.zeros((d, f.cartan.shape[1]))
            block[s] = f.cartan
            cartans.append(block)
        off += f.dim
    cartan = np.hstack(cartans) if cartans and len(cartans) == len(factors) else None
    label = "product(" + ",".join(f.label for f in factors) + ")"
    return QuadraticLieAlgebra(c, beta, theta, label=label, gram=gram, cartan=cartan)


def gc_algebra(n: int, g: QuadraticLieAlgebra, check=True) -> QuadraticLieAlgebra:
    """gl(n) + g with form Tr(AB) + beta_g and involution (A, v) -> (-A^T, theta v).

    Coordinates: the n*n entries of A in row-major order, then g coordinates.
    """
    if check and not validate_algebra(g).ok:
        raise CatalogError(f"gc requested over an algebra that fails validation: {g.label}")
    m = n * n
    d = m + g.dim
    c = np.zeros((d, d, d))
    beta = np.zeros((d, d))
    theta = np.zeros((d, d))
    idx = lambda a, b: a * n + b  # noqa: E731
    for a, b, cc, dd in iproduct(range(n), repeat=4):
        # [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
        if b == cc:
            c[idx(a, b), idx(cc, dd), idx(a, dd)] += 1.0
        if dd == a:
            c[idx(a, b), idx(cc, dd), idx(cc, b)] -= 1.0
    for a, b in iproduct(range(n), repeat=2):
        beta[idx(a, b), idx(b, a)] = 1.0
        theta[idx(b, a), idx(a, b)] = -1.0
    c[m:, m:, m:] = g.bracket
    beta[m:, m:] = g.form
    theta[m:, m:] = g.involution
    gram = np.zeros((d, d))
    gram[:m, :m] = np.eye(m)
    gram[m:, m:] = g.gram
    return QuadraticLieAlgebra(c, beta, theta, label=f"gc({n},{g.label})", gram=gram)


def catalog(name: str, *params) -> QuadraticLieAlgebra:
    """Built-in algebras.

    ``catalog("sl", m)``, ``catalog("su2")``, ``catalog("so3")``,
    ``catalog("product", a, b, ...)`` and ``catalog("gc", n, g)``; algebra
    arguments may be given as algebras or as names accepted by
    :func:`algebra_from_name`.
    """
    key = name.lower()
    if key in ("sl", "slr"):
        if len(params) != 1:
            raise CatalogError("sl needs one integer parameter")
        return sl_real(int(params[0]))
    if key in ("su2", "su(2)"):
        return su2()
    if key in ("so3", "so(3)"):
        return so3()
    if key == "product":
        if not params:
            raise CatalogError("product needs at least one factor")
        return direct_product(*[_as_algebra(p) for p in params])
    if key == "gc":
        if len(params) != 2:
            raise CatalogError("gc needs (n, g)")
        return gc_algebra(int(params[0]), _as_algebra(params[1]))
    return algebra_from_name(name)


def _as_algebra(obj):
    if isinstance(obj, QuadraticLieAlgebra):
        return obj
    return algebra_from_name(str(obj))


_SL = re.compile(r"^sl\(?(\d+)\s*,?\s*r?\)?$")


def algebra_from_name(name: str) -> QuadraticLieAlgebra:
    """Parse names like ``sl2R``, ``sl(3,R)``, ``su2``, ``so3``,
    ``product(su2,su2)`` and ``gc(2,sl2R)``."""
    text = name.replace(" ", "")
    low = text.lower()
    m = _SL.match(low)
    if m:
        return sl_real(int(m.group(1)))
    if low in ("su2", "su(2)"):
        return su2()
    if low in ("so3", "so(3)"):
        return so3()
    for head in ("product(", "gc("):
        if low.startswith(head) and low.endswith(")"):
            args = _split_args(text[len(head):-1])
            if head == "product(":
                return direct_product(*[algebra_from_name(a) for a in args])
            if len(args) != 2:
                raise CatalogError(f"gc needs two arguments: {name!r}")
            return gc_algebra(int(args[0]), algebra_from_name(args[1]))
    raise CatalogError(f"unknown algebra name: {name!r}")


def _split_args(text):
    args, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            args.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    args.append(cur)
    return [a for a in args if a]
