"""Moment map, energy functional and the identities they satisfy.

The moment value of a pair p lives in Symm(n) + p (p the -1 eigenspace of
theta on the codomain) and is characterized by

    <M(p), (A, v)> = <(A, v) . p, p>

for every (A, v) there.  ``moment_explicit`` uses the closed formula,
``moment_definitional`` evaluates the right-hand side on an orthonormal basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import QuadraticLieAlgebra
from .errors import ValidationError
from .pairs import DerivationSpace, Pair, TangentElement, inf_act, vn_inner


@dataclass(frozen=True, eq=False)
class MomentValue:
    M_gl: np.ndarray
    u: np.ndarray
    norm_pair_sq: float
    k: float
    D: np.ndarray
    energy: float
    codomain: QuadraticLieAlgebra = field(repr=False)

    @property
    def M_g(self):
        return self.u

    @property
    def n(self) -> int:
        return self.M_gl.shape[0]

    def norm_sq(self) -> float:
        """``||M||^2`` in the gl(n) + g inner product."""
        return float(np.sum(self.M_gl**2) + self.u @ self.codomain.gram @ self.u)

    def pair_with(self, A, v) -> float:
        """``<M, (A, v)>``."""
        return float(np.sum(self.M_gl * A) + self.u @ self.codomain.gram @ v)

    def du_norm_sq(self) -> float:
        return float(np.sum(self.D**2) + self.u @ self.codomain.gram @ self.u)

    def trace_identity_residual(self) -> float:
        """``|k Tr D - ||(D,u)||^2|`` relative to ``||p||^4``."""
        return abs(self.k * np.trace(self.D) - self.du_norm_sq()) / self.norm_pair_sq**2

    def u_in_p_residual(self) -> float:
        theta_u = self.codomain.involution @ self.u
        scale = max(self.codomain.norm(self.u), self.norm_pair_sq)
        return self.codomain.norm(theta_u + self.u) / scale if scale else 0.0


def _require_nonzero(p: Pair) -> float:
    nsq = p.norm_sq()
    if not nsq > 0:
        raise ValidationError("moment map is undefined at the zero pair")
    return nsq


def bracket_moment(mu):
    """Moment matrix of a bracket alone."""
    return 0.5 * np.einsum("ija,ijb->ab", mu, mu) - np.einsum("aik,bik->ab", mu, mu)


def phi_star_phi(p: Pair):
    return p.phi.T @ p.codomain.gram @ p.phi


def _finish(M_gl, u, nsq, alg) -> MomentValue:
    M_gl = (M_gl + M_gl.T) / 2
    msq = float(np.sum(M_gl**2) + u @ alg.gram @ u)
    k = msq / nsq
    D = M_gl + k * np.eye(M_gl.shape[0])
    return MomentValue(M_gl, u, nsq, k, (D + D.T) / 2, k / nsq, alg)


def moment_explicit(p: Pair) -> MomentValue:
    nsq = _require_nonzero(p)
    alg = p.codomain
    M_gl = bracket_moment(p.mu) - phi_star_phi(p)
    u = np.einsum("ai,bi,abc->c", alg.involution @ p.phi, p.phi, alg.bracket)
    return _finish(M_gl, u, nsq, alg)


def symmetric_basis(n):
    """Orthonormal basis of Symm(n) for the trace form."""
    out = []
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            if i == j:
                e[i, i] = 1.0
            else:
                e[i, j] = e[j, i] = 1 / np.sqrt(2)
            out.append(e)
    return out


def moment_definitional(p: Pair) -> MomentValue:
    nsq = _require_nonzero(p)
    alg = p.codomain
    n, d = p.n, alg.dim

    def pairing(A, v):
        t = inf_act(A, v, p)
        return vn_inner(t.dmu, t.dphi, p.mu, p.phi, alg)

    M_gl = np.zeros((n, n))
    for S in symmetric_basis(n):
        M_gl += pairing(S, np.zeros(d)) * S
    u = np.zeros(d)
    for q in alg.p_basis().T:
        u += pairing(np.zeros((n, n)), q) * q
    return _finish(M_gl, u, nsq, alg)


def energy(p: Pair) -> float:
    return moment_explicit(p).energy


def energy_gradient(p: Pair) -> TangentElement:
    """Gradient of E on the unit sphere, at the normalized representative.

    It equals ``4 (D, u) . x`` for the unit vector ``x``; this vector is
    tangent to the sphere because ``<(D,u).x, x> = <M,(D,u)> = 0`` there.
    """
    x = p.normalized()
    mv = moment_explicit(x)
    t = inf_act(mv.D, mv.u, x)
    return TangentElement(4 * t.dmu, 4 * t.dphi, p.codomain)


def derivation_orthogonality_check(p: Pair, ds: DerivationSpace) -> float:
    mv = moment_explicit(p)
    mnorm = np.sqrt(mv.norm_sq())
    worst = 0.0
    for A, v in ds.basis:
        bnorm = np.sqrt(np.sum(A**2) + v @ p.codomain.gram @ v)
        if mnorm == 0 or bnorm == 0:
            continue
        worst = max(worst, abs(mv.pair_with(A, v)) / (mnorm * bnorm))
    return float(worst)


@dataclass(frozen=True)
class PositivityEntry:
    value: float
    tight: bool
    theta_image_is_derivation: bool


def derivation_positivity_check(p: Pair, ds: DerivationSpace, tol=1e-10):
    """``<M, [theta~ x, x]>`` for every derivation basis element ``x``.

    The value is non-negative and vanishes exactly when ``theta~ x`` is again
    a derivation.  ``tight`` marks values within ``tol`` of zero (relative
    to ``||M|| ||x||^2``).
    """
    mv = moment_explicit(p)
    alg = p.codomain
    mnorm = np.sqrt(mv.norm_sq())
    nsq = p.norm_sq()
    out = []
    for A, v in ds.basis:
        tA, tv = -A.T, alg.involution @ v
        comm_A = tA @ A - A @ tA
        comm_v = alg.br(tv, v)
        value = mv.pair_with(comm_A, comm_v)
        scale = mnorm * (np.sum(A**2) + v @ alg.gram @ v)
        tight = abs(value) <= tol * max(scale, 1e-300)
        image = inf_act(tA, tv, p).norm() <= 1e-8 * nsq
        out.append(PositivityEntry(float(value), bool(tight), bool(image)))
    return out
