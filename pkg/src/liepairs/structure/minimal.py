"""Pairs of minimal energy 1/n: splitting into simple pieces, the metric
gauge of a semi-simple bracket, compatible Cartan involutions and the
abelian case."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra import killing_form
from ..errors import PreconditionError, ValidationError
from ..linalg import cluster_values, numerical_image, numerical_kernel, sqrt_psd
from ..moment import bracket_moment, moment_explicit, phi_star_phi
from ..pairs import GroupElement, Pair, act_mu, restrict


@dataclass(frozen=True, eq=False)
class Factor:
    basis: np.ndarray  # orthonormal columns in R^n
    kind: str  # "center" or "simple"
    homothety: float
    homothety_residual: float
    energy: float
    energy_gap: float


@dataclass(frozen=True, eq=False)
class MinimalDecomposition:
    factors: list
    center_dim: int
    orthogonality_residual: float
    energy_gap: float

    @property
    def max_homothety_residual(self) -> float:
        return max((f.homothety_residual for f in self.factors), default=0.0)

    @property
    def max_factor_energy_gap(self) -> float:
        return max((f.energy_gap for f in self.factors), default=0.0)


def _ad_stack(mu):
    """Matrix of X -> ad_X, flattened to shape (n*n, n)."""
    n = mu.shape[0]
    return np.transpose(mu, (2, 1, 0)).reshape(n * n, n)


def simple_ideals(mu, seed=0, tol=1e-8):
    """Orthonormal bases of the center and of the simple ideals of a reductive bracket.

    The derived part is split by the eigenspaces of a random symmetric element
    of the commutant of its adjoint representation.
    """
    n = mu.shape[0]
    if n == 0:
        return np.zeros((0, 0)), []
    if float(np.max(np.abs(mu))) <= 1e-12:
        return np.eye(n), []
    center, _ = numerical_kernel(_ad_stack(mu), tol)
    if center.shape[1]:
        derived, _ = numerical_kernel(center.T)
    else:
        derived = np.eye(n)
    r = derived.shape[1]
    if r == 0:
        return center, []
    nu = np.einsum("ia,jb,ijk,kc->abc", derived, derived, mu, derived)
    ads = [np.einsum("i,ijk->kj", e, nu) for e in np.eye(r)]
    # C ad_Y - ad_Y C = 0 for all Y, as a linear system in vec(C)
    eye = np.eye(r)
    rows = [np.kron(eye, ad.T) - np.kron(ad, eye) for ad in ads]
    comm, _ = numerical_kernel(np.vstack(rows), tol)
    rng = np.random.default_rng(seed)
    c = (comm @ rng.standard_normal(comm.shape[1])).reshape(r, r)
    c = (c + c.T) / 2
    w, v = np.linalg.eigh(c)
    spread = max(float(np.max(np.abs(w))), 1e-300)
    ideals = [derived @ v[:, g] for g in cluster_values(w, 1e-6 * spread)]
    return center, ideals


def minimal_decompose(p: Pair, tol=1e-7, seed=0) -> MinimalDecomposition:
    mv = moment_explicit(p)
    gap = abs(mv.energy - 1.0 / p.n)
    if gap > tol:
        raise PreconditionError(f"energy {mv.energy:.6g} is not 1/n (gap {gap:.2e})")
    center, ideals = simple_ideals(p.mu, seed)
    pieces = ([("center", center)] if center.shape[1] else []) + [("simple", q) for q in ideals]
    factors = []
    for kind, q in pieces:
        sub = restrict(p, q)
        pp = phi_star_phi(sub)
        c = float(np.trace(pp)) / q.shape[1]
        hres = float(np.linalg.norm(pp - c * np.eye(q.shape[1]))) / max(abs(c), 1e-300)
        e = moment_explicit(sub).energy
        factors.append(Factor(q, kind, c, hres, e, abs(e - 1.0 / q.shape[1])))
    nsq = mv.norm_pair_sq
    orth = 0.0
    for i, fi in enumerate(factors):
        for fj in factors[i + 1:]:
            cross = (p.phi @ fi.basis).T @ p.codomain.gram @ (p.phi @ fj.basis)
            orth = max(orth, float(np.max(np.abs(cross))) / nsq)
    return MinimalDecomposition(factors, center.shape[1], orth, gap)


def metric_constant(mu):
    """``n / (2 ||mu||^2)``: the factor relating the inner product to -B(theta'., .)."""
    n = mu.shape[0]
    nsq = 0.5 * float(np.sum(mu**2))
    return n / (2 * nsq)


@dataclass(frozen=True, eq=False)
class GaugeResult:
    element: GroupElement
    moment_residual: float
    metric_constant: float


def _check_cartan_involution(mu, theta_prime, tol=1e-8):
    scale = max(float(np.max(np.abs(mu))), 1e-300)
    aut = np.einsum("ijk,lk->ijl", mu, theta_prime) - np.einsum(
        "ai,bj,abk->ijk", theta_prime, theta_prime, mu
    )
    if float(np.max(np.abs(aut))) > tol * scale * max(1.0, np.max(np.abs(theta_prime))) ** 2:
        raise PreconditionError("theta' is not an automorphism of the bracket")
    if float(np.max(np.abs(theta_prime @ theta_prime - np.eye(mu.shape[0])))) > tol:
        raise PreconditionError("theta' is not an involution")
    B = killing_form(mu)
    q = -theta_prime.T @ B
    q = (q + q.T) / 2
    if np.min(np.linalg.eigvalsh(q)) <= tol * max(np.max(np.abs(q)), 1e-300):
        raise PreconditionError("-B(theta' ., .) is not positive definite")
    return q


def minimal_metric_gauge(mu, theta_prime, codomain_dim=0) -> GaugeResult:
    """``g`` in GL(n) making the dot product proportional to -B(theta'., .).

    After transport by ``g`` the bracket satisfies ``M = -(||mu'||^2/n) I``.
    ``g`` is rescaled so that ``||g . mu|| = ||mu||``.
    """
    mu = np.asarray(mu, dtype=float)
    theta_prime = np.asarray(theta_prime, dtype=float)
    n = mu.shape[0]
    B = killing_form(mu)
    if abs(np.linalg.det(B / max(np.max(np.abs(B)), 1e-300))) <= 1e-10:
        raise PreconditionError("Killing form of the bracket is degenerate")
    q = _check_cartan_involution(mu, theta_prime)
    g = sqrt_psd(q)
    new = act_mu(g, mu)
    g = g * np.sqrt(np.sum(new**2) / np.sum(mu**2))
    new = act_mu(g, mu)
    nsq = 0.5 * float(np.sum(new**2))
    resid = float(np.linalg.norm(bracket_moment(new) + nsq / n * np.eye(n))) / nsq
    return GaugeResult(GroupElement(g, np.eye(codomain_dim)), resid, metric_constant(new))


@dataclass(frozen=True, eq=False)
class MostowReport:
    theta_prime: np.ndarray = field(repr=False)
    involution_residual: float
    automorphism_residual: float
    intertwining_residual: float
    metric_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.involution_residual, self.automorphism_residual,
                   self.intertwining_residual, self.metric_residual)


def mostow_involution(p: Pair, tol=1e-6, seed=0) -> MostowReport:
    """``theta' = phi* theta phi`` (per simple factor, normalized by the homothety)."""
    mv = moment_explicit(p)
    n = p.n
    if abs(mv.energy - 1.0 / n) > tol:
        raise PreconditionError(f"energy {mv.energy:.6g} is not 1/n")
    B = killing_form(p.mu)
    if abs(np.linalg.det(B / max(np.max(np.abs(B)), 1e-300))) <= 1e-10:
        raise PreconditionError("bracket is not semi-simple (degenerate Killing form)")
    alg = p.codomain
    center, ideals = simple_ideals(p.mu, seed)
    theta_prime = np.zeros((n, n))
    metric = 0.0
    for q in ideals:
        phi_q = p.phi @ q
        pp = phi_q.T @ alg.gram @ phi_q
        c = float(np.trace(pp)) / q.shape[1]
        if c <= 0:
            raise PreconditionError("phi vanishes on a simple factor")
        t_q = phi_q.T @ alg.gram @ alg.involution @ phi_q / c
        theta_prime += q @ t_q @ q.T
        nu = restrict(p, q).mu
        bq = killing_form(nu)
        ident = metric_constant(nu) * (-t_q.T @ bq)
        metric = max(metric, float(np.max(np.abs(ident - np.eye(q.shape[1])))))
    mu = p.mu
    mscale = max(float(np.max(np.abs(mu))), 1e-300)
    aut = np.einsum("ijk,lk->ijl", mu, theta_prime) - np.einsum(
        "ai,bj,abk->ijk", theta_prime, theta_prime, mu
    )
    inter = alg.involution @ p.phi - p.phi @ theta_prime
    pscale = max(float(np.max(np.abs(p.phi))), 1e-300)
    return MostowReport(
        theta_prime=theta_prime,
        involution_residual=float(np.max(np.abs(theta_prime @ theta_prime - np.eye(n)))),
        automorphism_residual=float(np.max(np.abs(aut))) / mscale,
        intertwining_residual=float(np.max(np.abs(inter))) / pscale,
        metric_residual=metric,
    )


@dataclass(frozen=True)
class AbelianClassification:
    is_homothety: bool
    image_commutes: bool
    theta_invariant_envelope: bool
    minimal: bool
    energy: float
    consistent: bool


def abelian_classify(p: Pair, tol=1e-8) -> AbelianClassification:
    if p.n and float(np.max(np.abs(p.mu))) > 1e-12:
        raise PreconditionError("bracket is not zero")
    if not p.norm_sq() > 0:
        raise ValidationError("the zero pair is excluded")
    alg = p.codomain
    pp = phi_star_phi(p)
    c = float(np.trace(pp)) / p.n
    scale = max(abs(c), 1e-300)
    homothety = float(np.linalg.norm(pp - c * np.eye(p.n))) / scale <= tol
    commutes = _abelian(alg, p.phi, tol)
    envelope = numerical_image(np.hstack([p.phi, alg.involution @ p.phi]), 1e-10)
    envelope_ok = _abelian(alg, envelope, tol)
    energy = moment_explicit(p).energy
    minimal = abs(energy - 1.0 / p.n) <= tol
    flags = homothety and commutes and envelope_ok
    return AbelianClassification(
        is_homothety=bool(homothety),
        image_commutes=bool(commutes),
        theta_invariant_envelope=bool(envelope_ok),
        minimal=bool(minimal and flags),
        energy=energy,
        consistent=bool(minimal == flags),
    )


def _abelian(alg, vectors, tol):
    norms = [alg.norm(x) for x in vectors.T]
    for i, x in enumerate(vectors.T):
        for j, y in enumerate(vectors.T):
            if j <= i:
                continue
            size = alg.norm(alg.br(x, y))
            if size > tol * max(norms[i] * norms[j], 1e-300):
                return False
    return True
