"""Criticality, positivity of D, rational spectra and the induced gradations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from ..errors import PreconditionError, ReconstructionError
from ..linalg import cluster_values
from ..moment import moment_explicit, phi_star_phi
from ..pairs import Pair, derivation_space, gc_coords, pair_adjoint


@dataclass(frozen=True)
class CriticalityReport:
    projection_residual: float
    is_critical: bool
    tolerance: float
    energy: float
    D_spectrum: list
    D_min_eig: float
    der_dim: int


def criticality_test(p: Pair, tol=1e-6, der_tol=1e-8) -> CriticalityReport:
    """Distance from (D, u) to der(mu, phi), relative to ||p||^2.

    This is the normalization of the energy gradient, so the residual of a
    flow limit is comparable to its final gradient norm.
    """
    mv = moment_explicit(p)
    ds = derivation_space(p, der_tol)
    w = gc_coords(mv.D, mv.u, p.codomain)
    q = ds.coords().T
    residual = float(np.linalg.norm(w - q @ (q.T @ w)) / mv.norm_pair_sq)
    spectrum = np.linalg.eigvalsh(mv.D)
    return CriticalityReport(
        projection_residual=residual,
        is_critical=residual <= tol,
        tolerance=tol,
        energy=mv.energy,
        D_spectrum=[float(x) for x in spectrum],
        D_min_eig=float(spectrum[0]) if spectrum.size else 0.0,
        der_dim=ds.dim,
    )


@dataclass(frozen=True)
class PsdReport:
    min_eig: float
    spectrum: list
    violations: list  # kernel directions X of D with ad^{mu,phi}_X = 0


def psd_check(p: Pair, tol=1e-8) -> PsdReport:
    """Spectrum of D; kernel vectors of D must not be killed by ad^{mu,phi}."""
    mv = moment_explicit(p)
    w, vecs = np.linalg.eigh(mv.D)
    scale = max(float(np.max(np.abs(w))) if w.size else 0.0, mv.k, 1e-300)
    violations = []
    for lam, x in zip(w, vecs.T):
        if abs(lam) > tol * scale:
            continue
        A, v = pair_adjoint(p, x)
        size = np.sqrt(np.sum(A**2) + v @ p.codomain.gram @ v)
        if size <= tol * max(p.norm(), 1.0):
            violations.append([float(c) for c in x])
    return PsdReport(float(w[0]) if w.size else 0.0, [float(x) for x in w], violations)


def adu_symmetric(p: Pair, u):
    """ad_u in gram-orthonormal coordinates, symmetrized, and the coordinate root."""
    alg = p.codomain
    root = alg.gram_root()
    ad = np.einsum("i,ijk->kj", u, alg.bracket)
    s = root @ ad @ np.linalg.inv(root)
    return (s + s.T) / 2, root


@dataclass(frozen=True)
class RationalSpectrum:
    c: float
    k: float
    D_ints: list
    adu_ints: list
    residual: float
    D_eigs: list
    adu_eigs: list
    max_den: int


def _common_scale(values, max_den):
    fracs = [Fraction(float(x)).limit_denominator(max_den) for x in values]
    nonzero = [f for f in fracs if f != 0]
    if not nonzero:
        return Fraction(1)
    den = lcm(*[f.denominator for f in nonzero])
    num = 0
    for f in nonzero:
        num = gcd(num, abs(f.numerator) * (den // f.denominator))
    return Fraction(den, num)


def rational_spectrum(p: Pair, max_den=64, tol=1e-4) -> RationalSpectrum:
    """Integer weights of c (1/k) D and c (1/k) ad_u for the least such c > 0."""
    mv = moment_explicit(p)
    if mv.k <= 0:
        raise PreconditionError("k vanishes; the spectrum cannot be normalized")
    d_eigs = np.linalg.eigvalsh(mv.D) / mv.k
    adu, _ = adu_symmetric(p, mv.u)
    a_eigs = np.linalg.eigvalsh(adu) / mv.k
    allv = np.concatenate([d_eigs, a_eigs])
    c = _common_scale(allv, max_den)
    scaled = float(c) * allv
    ints = np.rint(scaled)
    residual = float(np.max(np.abs(scaled - ints))) if allv.size else 0.0
    if residual > tol:
        raise ReconstructionError(
            f"spectrum is not rational with denominators <= {max_den} (residual {residual:.3e})"
        )
    nd = d_eigs.size
    return RationalSpectrum(
        c=float(c),
        k=mv.k,
        D_ints=[int(x) for x in ints[:nd]],
        adu_ints=[int(x) for x in ints[nd:]],
        residual=residual,
        D_eigs=[float(x) for x in d_eigs],
        adu_eigs=[float(x) for x in a_eigs],
        max_den=max_den,
    )


@dataclass(frozen=True, eq=False)
class Gradation:
    c: float
    denominators_bound: int
    h_weights: list
    g_weights: list
    h_blocks: dict
    g_blocks: dict
    h_residual: float
    g_residual: float
    phi_residual: float

    @property
    def compat_residual(self) -> float:
        return max(self.h_residual, self.g_residual, self.phi_residual)


def _blocks(vectors, weights):
    out = {}
    for w in sorted(set(weights)):
        out[w] = vectors[:, [i for i, x in enumerate(weights) if x == w]]
    return out


def _off_block(z, block, gram):
    if block is None:
        return float(np.sqrt(max(z @ gram @ z, 0.0)))
    r = z - block @ (block.T @ gram @ z)
    return float(np.sqrt(max(r @ gram @ r, 0.0)))


def gradation(p: Pair, max_den=64) -> Gradation:
    """Eigenspace gradings of R^n by c D / k and of g by c ad_u / k."""
    rs = rational_spectrum(p, max_den)
    mv = moment_explicit(p)
    alg = p.codomain
    n = p.n
    _, hvec = np.linalg.eigh(mv.D)
    adu, root = adu_symmetric(p, mv.u)
    _, gvec_on = np.linalg.eigh(adu)
    gvec = np.linalg.solve(root, gvec_on)  # gram-orthonormal columns in g
    hb = _blocks(hvec, rs.D_ints)
    gb = _blocks(gvec, rs.adu_ints)

    pnorm = max(p.norm(), 1e-300)
    eye = np.eye(n)
    h_res = 0.0
    for a, ba in hb.items():
        for b, bb in hb.items():
            for x in ba.T:
                for y in bb.T:
                    h_res = max(h_res, _off_block(p.bracket(x, y), hb.get(a + b), eye))
    cmax = max(float(np.max(np.abs(alg.bracket))), 1e-300)
    g_res = 0.0
    for a, ba in gb.items():
        for b, bb in gb.items():
            for x in ba.T:
                for y in bb.T:
                    g_res = max(g_res, _off_block(alg.br(x, y), gb.get(a + b), alg.gram))
    phi_res = 0.0
    for a, ba in hb.items():
        for x in ba.T:
            phi_res = max(phi_res, _off_block(p.phi @ x, gb.get(a), alg.gram))
    return Gradation(
        c=rs.c,
        denominators_bound=max_den,
        h_weights=rs.D_ints,
        g_weights=rs.adu_ints,
        h_blocks=hb,
        g_blocks=gb,
        h_residual=h_res / pnorm,
        g_residual=g_res / cmax,
        phi_residual=phi_res / pnorm,
    )


@dataclass(frozen=True)
class AdaptedBasis:
    basis: np.ndarray
    D_eigs: list
    phi_eigs: list
    commutator: float


def adapted_basis(p: Pair, tol=1e-8) -> AdaptedBasis:
    """Orthonormal basis of joint eigenvectors of D and phi* phi."""
    mv = moment_explicit(p)
    pp = phi_star_phi(p)
    scale = max(mv.norm_pair_sq**2, 1e-300)
    comm = float(np.linalg.norm(mv.D @ pp - pp @ mv.D)) / scale
    if comm > tol:
        raise PreconditionError(f"D and phi*phi do not commute (residual {comm:.3e})")
    w, vecs = np.linalg.eigh(mv.D)
    cols, d_eigs, p_eigs = [], [], []
    spread = max(float(np.max(np.abs(w))), mv.k, 1e-300)
    for group in cluster_values(w, 1e-8 * spread):
        block = vecs[:, group]
        sub = block.T @ pp @ block
        sw, sv = np.linalg.eigh((sub + sub.T) / 2)
        for lam, y in zip(sw, sv.T):
            cols.append(block @ y)
            d_eigs.append(float(np.mean(w[group])))
            p_eigs.append(float(lam))
    order = sorted(range(len(cols)), key=lambda i: (d_eigs[i], p_eigs[i], i))
    basis = np.array([cols[i] for i in order]).T.reshape(p.n, -1)
    return AdaptedBasis(
        basis=basis,
        D_eigs=[d_eigs[i] for i in order],
        phi_eigs=[p_eigs[i] for i in order],
        commutator=comm,
    )
