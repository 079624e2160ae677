"""Levi splitting of critical pairs, their nilradical and reductive parts,
theta-invariant derivations and semi-direct extensions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra import QuadraticLieAlgebra, Subspace, gc_algebra, validate_algebra
from ..errors import NumericalError, PreconditionError, ValidationError
from ..linalg import intersect, numerical_image, numerical_kernel
from ..moment import moment_explicit
from ..pairs import Pair, derivation_space, residuals, restrict
from .critical import criticality_test


@dataclass(frozen=True, eq=False)
class LeviDecomposition:
    m_part: np.ndarray
    a_part: np.ndarray
    n_part: np.ndarray
    orthogonality_residual: float
    subalgebra_residual: float
    ideal_residual: float


def _bracket_leak(p: Pair, left, right, target):
    """Largest component of mu(left, right) outside span(target)."""
    worst = 0.0
    proj = target @ target.T if target.shape[1] else np.zeros((p.n, p.n))
    for x in left.T:
        for y in right.T:
            z = p.bracket(x, y)
            worst = max(worst, float(np.linalg.norm(z - proj @ z)))
    return worst


def levi_decompose(p: Pair, tol=1e-8) -> LeviDecomposition:
    """``R^n = m + a + n`` with ``n = im D`` and ``m + a = ker D``."""
    mv = moment_explicit(p)
    n = p.n
    n_part = numerical_image(mv.D, tol)
    if np.allclose(mv.D, 0, atol=1e-12 * max(mv.k, 1e-300)):
        n_part = np.zeros((n, 0))
    if n_part.shape[1]:
        kernel, _ = numerical_kernel(n_part.T)
    else:
        kernel = np.eye(n)
    brackets = [p.bracket(x, y) for x in kernel.T for y in kernel.T]
    if brackets:
        stack = np.array(brackets).T
        s = np.linalg.svd(stack, compute_uv=False)
        if s.size and s[0] > 0:
            gap = s[(s > tol * s[0]) & (s < 1e3 * tol * s[0])]
            if gap.size:
                raise NumericalError("derived ideal of ker D is numerically ill-conditioned")
        derived = numerical_image(stack, tol)
    else:
        derived = np.zeros((n, 0))
    m_part = intersect(kernel, derived, 1e-6) if derived.shape[1] else np.zeros((n, 0))
    if kernel.shape[1] and m_part.shape[1]:
        comp, _ = numerical_kernel(m_part.T @ kernel)
        a_part = kernel @ comp
    else:
        a_part = kernel
    blocks = [m_part, a_part, n_part]
    orth = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            if blocks[i].shape[1] and blocks[j].shape[1]:
                orth = max(orth, float(np.max(np.abs(blocks[i].T @ blocks[j]))))
    scale = max(p.norm(), 1e-300)
    sub_res = _bracket_leak(p, m_part, m_part, m_part) / scale
    ideal_res = _bracket_leak(p, np.eye(n), n_part, n_part) / scale
    return LeviDecomposition(m_part, a_part, n_part, orth, sub_res, ideal_res)


@dataclass(frozen=True, eq=False)
class RestrictionReport:
    u_difference: float
    D_difference: float
    criticality_residual: float
    k_difference: float


def restrict_nilradical(p: Pair, tol=1e-8):
    """Restriction of a critical pair to ``im D``, with the identities it obeys."""
    ld = levi_decompose(p, tol)
    q = ld.n_part
    if q.shape[1] == 0:
        empty = Pair(np.zeros((0, 0, 0)), np.zeros((p.codomain.dim, 0)), p.codomain)
        return empty, RestrictionReport(0.0, 0.0, 0.0, 0.0)
    sub = restrict(p, q)
    mv, mv_sub = moment_explicit(p), moment_explicit(sub)
    scale = mv.norm_pair_sq
    report = RestrictionReport(
        u_difference=p.codomain.norm(mv_sub.u - mv.u) / scale,
        D_difference=float(np.linalg.norm(mv_sub.D - q.T @ mv.D @ q)) / scale,
        criticality_residual=criticality_test(sub).projection_residual,
        k_difference=abs(mv_sub.k - mv.k) / scale,
    )
    return sub, report


@dataclass(frozen=True, eq=False)
class ReductiveReport:
    criticality_residual: float
    energy_gap: float
    k_difference: float
    u_norm: float
    dim_l: int
    dim_n: int


def reductive_part_pair(p: Pair, tol=1e-8):
    """The pair ``X -> (ad_X restricted to n, phi X)`` on ``l = ker D``.

    Its codomain is gc(dim n, g), with the nilradical written in an
    orthonormal basis.
    """
    ld = levi_decompose(p, tol)
    lbasis = np.hstack([ld.m_part, ld.a_part])
    nb = ld.n_part
    r, m = lbasis.shape[1], nb.shape[1]
    if r == 0:
        raise PreconditionError("ker D is trivial; there is no reductive part")
    codomain = gc_algebra(m, p.codomain, check=m > 0) if m else p.codomain
    nu = restrict(p, lbasis).mu
    cols = []
    for x in lbasis.T:
        ad = np.einsum("i,ijk->kj", x, p.mu)
        block = nb.T @ ad @ nb
        cols.append(np.concatenate([block.ravel(), p.phi @ x]))
    psi = np.array(cols).T.reshape(codomain.dim, r)
    new = Pair(nu, psi, codomain)
    mv_old, mv_new = moment_explicit(p), moment_explicit(new)
    scale = mv_old.norm_pair_sq
    report = ReductiveReport(
        criticality_residual=criticality_test(new).projection_residual,
        energy_gap=abs(mv_new.energy - 1.0 / r),
        k_difference=abs(mv_new.k - mv_old.k) / scale,
        u_norm=codomain.norm(mv_new.u) / scale,
        dim_l=r,
        dim_n=m,
    )
    return new, report


def _gc_root(n, alg: QuadraticLieAlgebra):
    d = alg.dim
    root = np.eye(n * n + d)
    if d:
        root[n * n:, n * n:] = alg.gram_root()
    return root


def theta_invariant_derivations(p: Pair, tol=1e-8) -> Subspace:
    """``der(mu, phi)`` intersected with its image under (A, v) -> (-A^T, theta v)."""
    n, alg = p.n, p.codomain
    amb = gc_algebra(n, alg, check=False)
    ds = derivation_space(p, tol)
    if ds.dim == 0:
        return Subspace(np.zeros((amb.dim, 0)), amb)
    root = _gc_root(n, alg)
    q = ds.coords().T
    t = root @ amb.involution @ np.linalg.inv(root)
    common = intersect(q, t @ q, tol)
    return Subspace(np.linalg.solve(root, common), amb)


def commutation_with_du(p: Pair, sub: Subspace) -> float:
    """Largest ``||[(A, v), (D, u)]||`` over the basis of ``sub``, relative."""
    mv = moment_explicit(p)
    amb = sub.ambient
    du = np.concatenate([mv.D.ravel(), mv.u])
    worst = 0.0
    scale = max(np.sqrt(mv.du_norm_sq()), 1e-300)
    for x in sub.orthonormal().basis.T:
        worst = max(worst, amb.norm(amb.br(x, du)) / scale)
    return worst


@dataclass(frozen=True, eq=False)
class DerivationAlgebra:
    """``r`` as a quadratic Lie algebra together with its embedding into gl(n) + g."""

    algebra: QuadraticLieAlgebra
    embedding: np.ndarray  # columns: gc coordinates of the algebra's basis
    n: int
    codomain: QuadraticLieAlgebra = field(repr=False)

    def gl_part(self, x):
        w = self.embedding @ x
        return w[: self.n * self.n].reshape(self.n, self.n)

    def g_part(self, x):
        return (self.embedding @ x)[self.n * self.n:]

    def coords_of(self, A, v):
        """Coordinates in ``algebra`` of an element of gl(n) + g lying in r."""
        amb = gc_algebra(self.n, self.codomain, check=False)
        w = np.concatenate([np.asarray(A).ravel(), v])
        return self.embedding.T @ amb.gram @ w


def derivation_algebra(p: Pair, tol=1e-8) -> DerivationAlgebra:
    sub = theta_invariant_derivations(p, tol)
    alg, q = sub.as_algebra(label=f"r({p.codomain.label})", tol=1e-7, return_basis=True)
    report = validate_algebra(alg, 1e-8)
    if not report.ok:
        raise NumericalError(f"r fails validation: {report.failures()}")
    return DerivationAlgebra(alg, q, p.n, p.codomain)


@dataclass(frozen=True, eq=False)
class ExtensionReport:
    ext_scale: float
    jacobi_residual: float
    hom_residual: float
    criticality_residual: float
    spectrum_residual: float
    u_residual: float
    k_base: float
    k_ext: float


def semidirect_extend(base: Pair, ext: Pair, r: DerivationAlgebra | None = None, tol=1e-6):
    """Semi-direct product of a critical pair into ``r`` with a nilpotent critical base.

    Coordinates of the product: the ``m`` extension coordinates first, then
    the ``n`` base coordinates.  ``ext`` is rescaled so both pieces share
    the same ``k``.
    """
    rep = criticality_test(base, tol)
    if not rep.is_critical:
        raise PreconditionError("base pair is not critical")
    mv_b = moment_explicit(base)
    if mv_b.k <= 0:
        raise PreconditionError("base pair has k = 0; cannot normalize the extension")
    scale_d = max(abs(x) for x in rep.D_spectrum)
    if rep.D_min_eig <= 1e-8 * scale_d:
        raise PreconditionError("base pair has nontrivial ker D (not nilpotent)")
    if r is None:
        r = derivation_algebra(base)
    if ext.codomain is not r.algebra and not (
        ext.codomain.dim == r.algebra.dim
        and np.allclose(ext.codomain.bracket, r.algebra.bracket, atol=1e-9)
    ):
        raise ValidationError("extension codomain is not the theta-invariant derivation algebra")
    n, m = base.n, ext.n
    g = base.codomain
    if m == 0:
        return base, ExtensionReport(1.0, *residuals(base), rep.projection_residual,
                                     0.0, 0.0, mv_b.k, 0.0)
    mv_e0 = moment_explicit(ext)
    t = np.sqrt(mv_b.k / mv_e0.k)
    ext = ext.scaled(t)
    mv_e = moment_explicit(ext)

    size = m + n
    mu = np.zeros((size, size, size))
    mu[:m, :m, :m] = ext.mu
    mu[m:, m:, m:] = base.mu
    deltas = [r.gl_part(ext.phi[:, i]) for i in range(m)]
    for i in range(m):
        # (X_i, B_j) -> delta(psi X_i) B_j
        mu[i, m:, m:] = deltas[i].T
        mu[m:, i, m:] = -deltas[i].T
    phi = np.zeros((g.dim, size))
    for i in range(m):
        phi[:, i] = r.g_part(ext.phi[:, i])
    phi[:, m:] = base.phi
    prod = Pair(mu, phi, g)

    mv_p = moment_explicit(prod)
    expect = np.zeros((size, size))
    expect[:m, :m] = mv_e.D
    expect[m:, m:] = r.gl_part(mv_e.u) + mv_b.D
    jac, hom = residuals(prod)
    scale = mv_p.norm_pair_sq
    report = ExtensionReport(
        ext_scale=float(t),
        jacobi_residual=jac,
        hom_residual=hom,
        criticality_residual=criticality_test(prod, tol).projection_residual,
        spectrum_residual=float(np.linalg.norm(mv_p.D - expect)) / scale,
        u_residual=g.norm(mv_p.u - r.g_part(mv_e.u) - mv_b.u) / scale,
        k_base=mv_b.k,
        k_ext=mv_e.k,
    )
    return prod, report


def toral_extension(base: Pair, r: DerivationAlgebra | None = None) -> Pair:
    """One-dimensional extension ``(0, psi)`` with ``psi(e_1)`` along (D, u) of the base."""
    r = r or derivation_algebra(base)
    mv = moment_explicit(base)
    x = r.coords_of(mv.D, mv.u)
    x = x / np.linalg.norm(x)
    return Pair(np.zeros((1, 1, 1)), x.reshape(-1, 1), r.algebra)
