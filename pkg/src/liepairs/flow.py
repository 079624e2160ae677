"""Negative gradient flow of the energy and norm minimization along orbits."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import ResidualGuardError, ValidationError
from .linalg import cluster_values
from .moment import moment_explicit
from .pairs import GroupElement, Pair, group_act, inf_act, project_to_variety, residuals


@dataclass(frozen=True)
class FlowOptions:
    step_init: float = 1e-2
    tol_grad: float = 1e-8
    max_steps: int = 200_000
    residual_guard: float = 1e-6
    record_every: int = 1

    def __post_init__(self):
        for name in ("step_init", "tol_grad", "max_steps", "residual_guard", "record_every"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not self.tol_grad < 1e-3:
            raise ValidationError("tol_grad must be below 1e-3")


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    energy: float
    grad_norm: float
    jacobi_res: float
    hom_res: float
    norm: float


@dataclass(frozen=True, eq=False)
class FlowResult:
    limit: Pair
    limit_energy: float
    stratum_label: float
    steps: int
    converged: bool
    grad_norm: float
    trajectory: list = field(default_factory=list, repr=False)


@dataclass(frozen=True, eq=False)
class MinimizeResult:
    minimizer: Pair
    group_log: GroupElement
    final_norm: float
    norm_history: list
    verdict: str
    moment_residual: float
    steps: int


_ARMIJO = 1e-4
_MAX_STEP = 1e3
_MAX_MOVE = 0.5
_MAX_GENERATOR = 8.0


def _flow_state(x: Pair):
    mv = moment_explicit(x)
    grad = inf_act(4 * mv.D, 4 * mv.u, x)
    return mv, grad.norm()


def _guard(x: Pair, opts: FlowOptions, step: int):
    jac, hom = residuals(x)
    if max(jac, hom) > opts.residual_guard:
        raise ResidualGuardError(
            f"pair left the variety at step {step}: jacobi={jac:.3e}, hom={hom:.3e}"
        )
    return jac, hom


def flow_energy(p: Pair, opts: FlowOptions | None = None) -> FlowResult:
    """Follow the negative gradient of E on the unit sphere until it vanishes.

    Each step moves along the orbit, ``x <- normalize(exp(-4h (D,u)) . x)``,
    which keeps the iterate on the variety up to roundoff; ``h`` comes from
    Armijo backtracking and grows after successful steps.
    """
    opts = opts or FlowOptions()
    x = p.normalized()
    jac, hom = _guard(x, opts, 0)
    mv, gnorm = _flow_state(x)
    h = opts.step_init
    trajectory = [TrajectoryRecord(0, mv.energy, gnorm, jac, hom, 1.0)]
    step = 0
    while gnorm > opts.tol_grad and step < opts.max_steps:
        # bound the first-order displacement of the unit pair, not the generator:
        # components of (D, u) acting as derivations do not move the pair
        h = min(h, _MAX_MOVE / (gnorm + 1e-300))
        # ...but huge generators still amplify roundoff through exp
        h = min(h, _MAX_GENERATOR / (4 * mv.du_norm_sq() ** 0.5 + 1e-300))
        while True:
            elem = GroupElement.exp(-4 * h * mv.D, -4 * h * mv.u, x.codomain)
            y = project_to_variety(group_act(elem, x))
            ynorm = y.norm()
            y = y.scaled(1.0 / ynorm)
            mv_y, gnorm_y = _flow_state(y)
            drop = mv.energy - mv_y.energy
            if drop >= _ARMIJO * h * gnorm**2:
                break
            # at roundoff level the energy cannot resolve progress; the gradient can
            if abs(drop) <= 1e-14 * mv.energy and gnorm_y < gnorm and drop > -1e-13:
                break
            h /= 2
            if h < 1e-300:
                break
        step += 1
        x, mv, gnorm = y, mv_y, gnorm_y
        h = min(2 * h, _MAX_STEP)
        jac, hom = _guard(x, opts, step)
        if step % opts.record_every == 0 or gnorm <= opts.tol_grad:
            trajectory.append(TrajectoryRecord(step, mv.energy, gnorm, jac, hom, ynorm))
    converged = bool(gnorm <= opts.tol_grad)
    if trajectory[-1].step != step:
        trajectory.append(TrajectoryRecord(step, mv.energy, gnorm, jac, hom, 1.0))
    return FlowResult(
        limit=x,
        limit_energy=float(mv.energy),
        stratum_label=float(mv.energy),
        steps=step,
        converged=converged,
        grad_norm=float(gnorm),
        trajectory=trajectory,
    )


def assign_strata(results, tol=1e-4):
    """Relabel flow results so energies within ``tol`` share their cluster mean."""
    energies = np.array([r.limit_energy for r in results])
    out = list(results)
    for group in cluster_values(energies, tol):
        label = float(np.mean(energies[group]))
        for idx in group:
            out[idx] = dataclasses.replace(out[idx], stratum_label=label)
    return out


def _projected_moment(x: Pair, subgroup: str):
    mv = moment_explicit(x)
    nsq = mv.norm_pair_sq
    A = mv.M_gl / nsq
    if subgroup == "det1":
        A = A - np.trace(A) / x.n * np.eye(x.n)
    v = mv.u / nsq
    size = float(np.sqrt(np.sum(A**2) + v @ x.codomain.gram @ v))
    return A, v, size


def kempf_ness_minimize(p: Pair, subgroup: str = "det1", opts: FlowOptions | None = None,
                        collapse=1e-8) -> MinimizeResult:
    """Descend ``g -> ||g.p||^2`` over exp of the symmetric part of the group.

    The descent direction is the normalized moment value ``-M(x)/||x||^2``
    (traceless in the gl part for ``det1``), which is the gradient of
    ``log ||x||^2``.  Steps are group exponentials with Armijo backtracking.
    """
    if subgroup not in ("full", "det1"):
        raise ValidationError(f"unknown subgroup {subgroup!r}")
    opts = opts or FlowOptions()
    x = p
    nsq0 = x.norm_sq()
    if not nsq0 > 0:
        raise ValidationError("cannot minimize the zero pair")
    log = GroupElement.identity(p.n, p.codomain.dim)
    history = [float(np.sqrt(nsq0))]
    A, v, size = _projected_moment(x, subgroup)
    h = opts.step_init
    verdict = "inconclusive"
    step = 0
    while step < opts.max_steps:
        if size <= opts.tol_grad:
            verdict = "polystable_candidate"
            break
        if history[-1] < collapse * history[0]:
            verdict = "unstable_candidate"
            break
        f0 = np.log(x.norm_sq())
        while True:
            elem = GroupElement.exp(-h * A, -h * v, x.codomain)
            y = group_act(elem, x)
            f1 = np.log(y.norm_sq())
            if f1 <= f0 - _ARMIJO * 2 * h * size**2:
                break
            if f1 <= f0 and abs(f1 - f0) <= 1e-14:
                break
            h /= 2
            if h < 1e-300:
                break
        if not f1 <= f0:
            break
        step += 1
        x = y
        log = elem.compose(log)
        history.append(float(np.sqrt(x.norm_sq())))
        A, v, size = _projected_moment(x, subgroup)
        h = min(2 * h, _MAX_STEP)
    else:
        if size <= opts.tol_grad:
            verdict = "polystable_candidate"
        elif history[-1] < collapse * history[0]:
            verdict = "unstable_candidate"
    return MinimizeResult(
        minimizer=x,
        group_log=log,
        final_norm=history[-1],
        norm_history=history,
        verdict=verdict,
        moment_residual=size,
        steps=step,
    )
