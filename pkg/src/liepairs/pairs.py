"""Points (mu, phi) of V_n(g), the group GL(n) x Inn(g) and its Lie algebra action.

Conventions: ``mu[i, j, k]`` is the e_k-coefficient of mu(e_i, e_j) and
``phi[:, j]`` holds the codomain coordinates of phi(e_j).  The source R^n
carries the dot product.  The inner product on V_n is

    <(mu, phi), (mu', phi')> = sum_{i<j,k} mu[i,j,k] mu'[i,j,k] + tr(phi^T G phi')

with ``G`` the codomain gram matrix, and gl(n) + g carries
``Tr(A B^T) + <v, w>_G``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import QuadraticLieAlgebra, Subspace, adjoint, gc_algebra
from .errors import ValidationError
from .linalg import numerical_kernel


def _ro(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pair:
    """A bracket ``mu`` on R^n together with a linear map ``phi`` into ``codomain``."""

    mu: np.ndarray
    phi: np.ndarray
    codomain: QuadraticLieAlgebra = field(repr=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        n = mu.shape[0] if mu.ndim == 3 else 0
        mu = mu.reshape(n, n, n)
        phi = np.asarray(self.phi, dtype=float).reshape(self.codomain.dim, n)
        asym = float(np.max(np.abs(mu + mu.transpose(1, 0, 2)))) if mu.size else 0.0
        scale = max(float(np.max(np.abs(mu))), 1.0) if mu.size else 1.0
        if asym > 1e-12 * scale:
            raise ValidationError(f"mu is not antisymmetric (residual {asym:.3e})")
        object.__setattr__(self, "mu", _ro(mu))
        object.__setattr__(self, "phi", _ro(phi))

    @classmethod
    def from_entries(cls, n, entries, phi, codomain):
        """Build from ``[i, j, k, value]`` quadruples with ``i < j``."""
        mu = np.zeros((n, n, n))
        for i, j, k, val in entries:
            i, j, k = int(i), int(j), int(k)
            if not i < j:
                raise ValidationError(f"bracket entries need i < j, got ({i}, {j})")
            mu[i, j, k] += val
            mu[j, i, k] -= val
        return cls(mu, phi, codomain)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def norm_sq(self) -> float:
        return vn_inner(self.mu, self.phi, self.mu, self.phi, self.codomain)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def scaled(self, c):
        return Pair(c * self.mu, c * self.phi, self.codomain)

    def normalized(self):
        nrm = self.norm()
        if nrm == 0:
            raise ValidationError("the zero pair has no projective class")
        return self.scaled(1.0 / nrm)

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.mu)

    def with_codomain(self, codomain, phi=None):
        return Pair(self.mu, self.phi if phi is None else phi, codomain)

    def __repr__(self):
        return f"Pair(n={self.n}, codomain={self.codomain.label!r})"


@dataclass(frozen=True, eq=False)
class TangentElement:
    """A vector of V_n(g), typically the image of the infinitesimal action."""

    dmu: np.ndarray
    dphi: np.ndarray
    codomain: QuadraticLieAlgebra = field(repr=False)

    def norm(self) -> float:
        return float(np.sqrt(vn_inner(self.dmu, self.dphi, self.dmu, self.dphi, self.codomain)))

    def inner(self, other) -> float:
        return vn_inner(self.dmu, self.dphi, other.dmu, other.dphi, self.codomain)

    def as_pair(self) -> Pair:
        return Pair(self.dmu, self.dphi, self.codomain)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element (g, h) of GL(n, R) x Inn(codomain)."""

    gl_part: np.ndarray
    inner_part: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gl_part", _ro(self.gl_part))
        object.__setattr__(self, "inner_part", _ro(self.inner_part))

    @classmethod
    def identity(cls, n, d):
        return cls(np.eye(n), np.eye(d))

    @classmethod
    def exp(cls, A, v, alg: QuadraticLieAlgebra):
        """``(exp A, exp ad_v)``."""
        return cls(expm(np.asarray(A, dtype=float)), expm(adjoint(alg, v)))

    def compose(self, other):
        """``self * other`` (apply ``other`` first)."""
        return GroupElement(self.gl_part @ other.gl_part, self.inner_part @ other.inner_part)

    def inverse(self):
        return GroupElement(np.linalg.inv(self.gl_part), np.linalg.inv(self.inner_part))

    def automorphism_residual(self, alg: QuadraticLieAlgebra) -> float:
        h = self.inner_part
        lhs = np.einsum("ijk,lk->ijl", alg.bracket, h)
        rhs = np.einsum("ai,bj,abk->ijk", h, h, alg.bracket)
        return float(np.max(np.abs(lhs - rhs))) if alg.dim else 0.0

    def is_orthogonal_type(self, alg: QuadraticLieAlgebra, tol=1e-10) -> bool:
        g, h = self.gl_part, self.inner_part
        return bool(
            np.allclose(g.T @ g, np.eye(g.shape[0]), atol=tol)
            and np.allclose(h.T @ alg.gram @ h, alg.gram, atol=tol)
        )


@dataclass(frozen=True, eq=False)
class DerivationSpace:
    """Gram-orthonormal basis of der(mu, phi) inside gl(n) + g."""

    A: np.ndarray  # (k, n, n)
    v: np.ndarray  # (k, d)
    singular_values: np.ndarray
    cutoff: float
    codomain: QuadraticLieAlgebra = field(repr=False)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def basis(self):
        return list(zip(self.A, self.v))

    def coords(self):
        """Orthonormal coordinates of the basis, shape (k, n*n + d)."""
        return np.array([gc_coords(a, v, self.codomain) for a, v in self.basis]).reshape(
            self.dim, -1
        )

    def as_subspace(self) -> Subspace:
        n = self.A.shape[1] if self.A.ndim == 3 else 0
        amb = gc_algebra(n, self.codomain, check=False)
        cols = np.hstack([self.A.reshape(self.dim, -1), self.v]).T
        return Subspace(cols.reshape(amb.dim, self.dim), amb)


# ---------------------------------------------------------------------------
# inner products and coordinates

def vn_inner(mu1, phi1, mu2, phi2, alg: QuadraticLieAlgebra) -> float:
    return float(0.5 * np.sum(mu1 * mu2) + np.sum(phi1 * (alg.gram @ phi2)))


def vn_coords(mu, phi, alg: QuadraticLieAlgebra):
    """Orthonormal coordinates on V_n: mu entries with i<j, then R phi."""
    n = mu.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    root = alg.gram_root() if alg.dim else np.zeros((0, 0))
    return np.concatenate([mu[iu, ju, :].ravel(), (root @ phi).ravel()])


def gc_coords(A, v, alg: QuadraticLieAlgebra):
    """Orthonormal coordinates on gl(n) + g."""
    root = alg.gram_root() if alg.dim else np.zeros((0, 0))
    return np.concatenate([np.asarray(A, dtype=float).ravel(), root @ v])


def gc_from_coords(x, n, alg: QuadraticLieAlgebra):
    root = alg.gram_root() if alg.dim else np.zeros((0, 0))
    A = np.asarray(x[: n * n]).reshape(n, n)
    v = np.linalg.solve(root, x[n * n:]) if alg.dim else np.zeros(0)
    return A, v


def gc_inner(A1, v1, A2, v2, alg: QuadraticLieAlgebra) -> float:
    return float(np.sum(A1 * A2) + v1 @ alg.gram @ v2)


# ---------------------------------------------------------------------------
# the defining equations and the actions

def residuals(p: Pair):
    """(jacobi, hom) residuals of the defining system, relative to ||p||^2."""
    nsq = p.norm_sq()
    if nsq == 0 or p.n == 0:
        return 0.0, 0.0
    return jacobi_residual(p.mu) / nsq, hom_residual(p) / nsq


def jacobi_residual(mu) -> float:
    t1 = np.einsum("jkl,ilm->ijkm", mu, mu)
    t2 = np.einsum("ijl,lkm->ijkm", mu, mu)
    t3 = np.einsum("ikl,jlm->ijkm", mu, mu)
    jac = t1 - t2 - t3
    return float(np.max(np.linalg.norm(jac, axis=-1))) if jac.size else 0.0


def hom_residual(p: Pair) -> float:
    lhs = np.einsum("ijk,ak->ija", p.mu, p.phi)
    rhs = np.einsum("ai,bj,abc->ijc", p.phi, p.phi, p.codomain.bracket)
    diff = lhs - rhs
    if not diff.size:
        return 0.0
    sq = np.einsum("ija,ab,ijb->ij", diff, p.codomain.gram, diff)
    return float(np.sqrt(max(float(np.max(sq)), 0.0)))


def act_mu(g, mu):
    """``(g . mu)(X, Y) = g mu(g^-1 X, g^-1 Y)``."""
    ginv = np.linalg.inv(g)
    return np.einsum("ck,ijk,ia,jb->abc", g, mu, ginv, ginv)


def group_act(elem: GroupElement, p: Pair) -> Pair:
    g = elem.gl_part
    if abs(np.linalg.det(g)) <= 1e-12:
        raise ValidationError("gl part of the group element is singular")
    ginv = np.linalg.inv(g)
    mu = np.einsum("ck,ijk,ia,jb->abc", g, p.mu, ginv, ginv)
    phi = elem.inner_part @ p.phi @ ginv
    mu = (mu - mu.transpose(1, 0, 2)) / 2
    return Pair(mu, phi, p.codomain)


def inf_act_mu(A, mu):
    """Derivative at t=0 of ``exp(tA) . mu``: ``A mu(X,Y) - mu(AX,Y) - mu(X,AY)``."""
    return (
        np.einsum("ck,abk->abc", A, mu)
        - np.einsum("ia,ibc->abc", A, mu)
        - np.einsum("jb,ajc->abc", A, mu)
    )


def inf_act(A, v, p: Pair) -> TangentElement:
    """``(A, v) . (mu, phi) = (A . mu, ad_v phi - phi A)``."""
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    dmu = inf_act_mu(A, p.mu)
    dphi = adjoint(p.codomain, v) @ p.phi - p.phi @ A
    return TangentElement(dmu, dphi, p.codomain)


def action_matrix(p: Pair):
    """Matrix of (A, v) -> (A, v).p in orthonormal coordinates of gl(n)+g and V_n."""
    n, alg = p.n, p.codomain
    d = alg.dim
    root_inv = np.linalg.inv(alg.gram_root()) if d else np.zeros((0, 0))
    cols = []
    for idx in range(n * n):
        A = np.zeros(n * n)
        A[idx] = 1.0
        t = inf_act(A.reshape(n, n), np.zeros(d), p)
        cols.append(vn_coords(t.dmu, t.dphi, alg))
    for idx in range(d):
        t = inf_act(np.zeros((n, n)), root_inv[:, idx], p)
        cols.append(vn_coords(t.dmu, t.dphi, alg))
    return np.array(cols).T


def derivation_space(p: Pair, tol=1e-8) -> DerivationSpace:
    """Numerical kernel of the infinitesimal action at ``p``."""
    n, alg = p.n, p.codomain
    mat = action_matrix(p)
    kernel, spectrum = numerical_kernel(mat, tol)
    As, vs = [], []
    for x in kernel.T:
        A, v = gc_from_coords(x, n, alg)
        As.append(A)
        vs.append(v)
    k = len(As)
    return DerivationSpace(
        A=np.array(As).reshape(k, n, n),
        v=np.array(vs).reshape(k, alg.dim),
        singular_values=spectrum,
        cutoff=tol,
        codomain=alg,
    )


def pair_adjoint(p: Pair, X):
    """``X -> (ad^mu_X, phi X)``."""
    X = np.asarray(X, dtype=float)
    A = np.einsum("i,ijk->kj", X, p.mu)
    return A, p.phi @ X


def restrict(p: Pair, basis) -> Pair:
    """Restriction of ``p`` to the span of orthonormal columns ``basis``.

    The span must be closed under ``mu``; the bracket is re-expressed in the
    given basis.
    """
    Q = np.asarray(basis, dtype=float).reshape(p.n, -1)
    mu = np.einsum("ia,jb,ijk,kc->abc", Q, Q, p.mu, Q)
    mu = (mu - mu.transpose(1, 0, 2)) / 2
    return Pair(mu, p.phi @ Q, p.codomain)


def is_automorphism(elem: GroupElement, p: Pair, tol=1e-8) -> bool:
    """Membership of ``elem`` in aut(mu, phi): the action fixes ``p``."""
    q = group_act(elem, p)
    diff = vn_inner(q.mu - p.mu, q.phi - p.phi, q.mu - p.mu, q.phi - p.phi, p.codomain)
    return bool(np.sqrt(diff) <= tol * max(p.norm(), 1.0))


def vn_from_coords(x, n, alg: QuadraticLieAlgebra):
    """Inverse of :func:`vn_coords`."""
    iu, ju = np.triu_indices(n, k=1)
    m = iu.size * n
    mu = np.zeros((n, n, n))
    mu[iu, ju, :] = np.asarray(x[:m]).reshape(iu.size, n)
    mu[ju, iu, :] = -mu[iu, ju, :]
    phi = np.asarray(x[m:]).reshape(alg.dim, n)
    if alg.dim:
        phi = np.linalg.solve(alg.gram_root(), phi)
    return mu, phi


def _equations(mu, phi, alg: QuadraticLieAlgebra):
    jac = (
        np.einsum("jkl,ilm->ijkm", mu, mu)
        - np.einsum("ijl,lkm->ijkm", mu, mu)
        - np.einsum("ikl,jlm->ijkm", mu, mu)
    )
    hom = np.einsum("ijk,ak->ija", mu, phi) - np.einsum("ai,bj,abc->ijc", phi, phi, alg.bracket)
    if alg.dim:
        hom = hom @ alg.gram_root().T
    return np.concatenate([jac.ravel(), hom.ravel()])


def project_to_variety(p: Pair, tol=1e-13, max_iter=3) -> Pair:
    """Pull a pair that sits within roundoff of the variety back onto it.

    Gauss-Newton on the defining equations with minimum-norm corrections;
    the equations are quadratic, so the Jacobian comes from polarization.
    """
    n, alg = p.n, p.codomain
    x = vn_coords(p.mu, p.phi, alg)
    mu, phi = vn_from_coords(x, n, alg)
    f = _equations(mu, phi, alg)
    for _ in range(max_iter):
        if not f.size or np.max(np.abs(f)) <= tol * max(x @ x, 1e-300):
            break
        jac = np.empty((f.size, x.size))
        for idx in range(x.size):
            e = np.zeros(x.size)
            e[idx] = 1.0
            dmu, dphi = vn_from_coords(e, n, alg)
            f_e = _equations(dmu, dphi, alg)
            f_xe = _equations(mu + dmu, phi + dphi, alg)
            jac[:, idx] = f_xe - f - f_e
        dx = np.linalg.lstsq(jac, -f, rcond=1e-10)[0]
        # near singular points of the variety a correction can overshoot
        mu_new, phi_new = vn_from_coords(x + dx, n, alg)
        f_new = _equations(mu_new, phi_new, alg)
        if np.linalg.norm(f_new) >= np.linalg.norm(f):
            break
        x, f = x + dx, f_new
    mu, phi = vn_from_coords(x, n, alg)
    return Pair(mu, phi, alg)
