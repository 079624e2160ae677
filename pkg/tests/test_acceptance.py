"""Acceptance criteria.

Each test records a one-line verdict in ``acceptance_log``; the summary is
printed at the end of the session.
"""

import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from liepairs import (
    FlowOptions,
    GroupElement,
    ValidationError,
    algebra_from_name,
    catalog_pair,
    energy_gradient,
    flow_energy,
    group_act,
    inf_act,
    kempf_ness_minimize,
    moment_definitional,
    moment_explicit,
    random_pair,
)
from liepairs.instances import CATALOG_PAIRS
from liepairs.moment import energy
from liepairs.structure import (
    criticality_test,
    derivation_algebra,
    gradation,
    mostow_involution,
    psd_check,
    rational_spectrum,
    reductive_part_pair,
    restrict_nilradical,
    semidirect_extend,
    toral_extension,
)

ALGEBRAS = ["sl2R", "su2", "sl3R"]


def record(log, n, ok, detail):
    log[n] = (bool(ok), detail)
    assert ok, detail


def moment_gap(a, b):
    alg = a.codomain
    return float(np.sqrt(np.sum((a.M_gl - b.M_gl) ** 2) + alg.norm(a.u - b.u) ** 2))


def variety_points(count, seed0=0):
    """Seeded points of the variety, cycling through generators and algebras."""
    out, seed = [], seed0
    modes = ["orbit-perturb", "abelian", "subalgebra"]
    while len(out) < count:
        alg = algebra_from_name(ALGEBRAS[seed % 3])
        mode = modes[(seed // 3) % 3]
        n = 1 + (seed // 9) % 3
        seed += 1
        try:
            out.append(random_pair(mode, alg, n, seed).normalized())
        except ValidationError:
            continue
    return out


def extension_products():
    prods = []
    for name in ("heisenberg-sl3", "borel-sl2R"):
        base = catalog_pair(name)
        if name != "heisenberg-sl3":
            base, _ = restrict_nilradical(base)
        r = derivation_algebra(base)
        prod, _ = semidirect_extend(base, toral_extension(base, r), r)
        prods.append(prod)
    return prods


def test_criterion_01_oracle_equivalence(acceptance_log):
    start = time.perf_counter()
    worst = 0.0
    for name in ALGEBRAS:
        alg = algebra_from_name(name)
        for n in range(1, 5):
            for seed in range(100):
                p = random_pair("ambient", alg, n, seed)
                a, b = moment_explicit(p), moment_definitional(p)
                worst = max(worst, moment_gap(a, b) / p.norm_sq())
    elapsed = time.perf_counter() - start
    record(acceptance_log, 1, worst <= 1e-10 and elapsed < 10,
           f"max relative gap {worst:.2e} over 1200 points in {elapsed:.2f} s")


def generic_points(count):
    """Seeded variety points away from the critical set (n >= 2, perturbed or abelian)."""
    out, seed = [], 0
    while len(out) < count:
        alg = algebra_from_name(ALGEBRAS[seed % 3])
        mode = ("orbit-perturb", "abelian")[(seed // 3) % 2]
        n = 2 + (seed // 6) % 2
        seed += 1
        try:
            p = random_pair(mode, alg, n, seed).normalized()
        except ValidationError:
            continue
        if energy_gradient(p).norm() > 1e-6:
            out.append(p)
    return out


def test_criterion_02_gradient(acceptance_log):
    rng = np.random.default_rng(2024)
    h = 1e-5
    worst = 0.0
    for p in generic_points(20):
        grad = energy_gradient(p)
        for _ in range(5):
            A = rng.standard_normal((p.n, p.n))
            v = rng.standard_normal(p.codomain.dim)
            plus = energy(group_act(GroupElement.exp(h * A, h * v, p.codomain), p))
            minus = energy(group_act(GroupElement.exp(-h * A, -h * v, p.codomain), p))
            fd = (plus - minus) / (2 * h)
            analytic = grad.inner(inf_act(A, v, p))
            worst = max(worst, abs(analytic - fd) / abs(fd))
    record(acceptance_log, 2, worst <= 1e-5,
           f"max relative deviation {worst:.2e} over 20 points x 5 directions")


def test_criterion_03_identities(acceptance_log):
    values = []
    for name in ALGEBRAS:
        alg = algebra_from_name(name)
        for n in range(1, 5):
            for seed in range(10):
                values.append(moment_explicit(random_pair("ambient", alg, n, seed)))
    values += [moment_explicit(p) for p in variety_points(60)]
    values += [moment_explicit(catalog_pair(name)) for name in sorted(CATALOG_PAIRS)]
    values += [moment_explicit(p) for p in extension_products()]
    trace = max(mv.trace_identity_residual() for mv in values)
    bound = min(mv.energy - 1.0 / mv.M_gl.shape[0] for mv in values)
    in_p = max(mv.u_in_p_residual() for mv in values)
    ok = trace <= 1e-10 and bound >= -1e-12 and in_p <= 1e-10
    record(acceptance_log, 3, ok,
           f"{len(values)} values: trace {trace:.1e}, E - 1/n >= {bound:.1e}, u off p {in_p:.1e}")


def test_criterion_04_minimal_stratum(acceptance_log, sl2):
    from liepairs import Pair

    p = catalog_pair("cartan-line-sl2R")
    mv = moment_explicit(p)
    verdict = kempf_ness_minimize(p).verdict
    phi = np.zeros((3, 1))
    phi[1, 0] = 1.0
    nil = kempf_ness_minimize(Pair(np.zeros((1, 1, 1)), phi, sl2),
                              opts=FlowOptions(max_steps=200_000))
    ratio = nil.final_norm / nil.norm_history[0]
    ok = (abs(mv.energy - 1.0) <= 1e-10 and np.abs(mv.D).max() <= 1e-10
          and verdict == "polystable_candidate" and nil.verdict == "unstable_candidate"
          and ratio < 1e-8 and nil.steps <= 200_000)
    record(acceptance_log, 4, ok,
           f"line E-1 {mv.energy - 1:.1e}, {verdict}; nilpotent {nil.verdict}, "
           f"norm ratio {ratio:.1e} after {nil.steps} steps")


def test_criterion_05_nilradical_instance(acceptance_log, exact_values):
    ref = exact_values["heisenberg-sl3"]
    p = catalog_pair("heisenberg-sl3")
    crit = criticality_test(p, tol=1e-8)
    psd = psd_check(p)
    rs = rational_spectrum(p)
    gr = gradation(p)
    matches = (sorted(rs.D_ints) == ref["D_weights"] and sorted(rs.adu_ints) == ref["adu_weights"]
               and abs(rs.c - float(Fraction(ref["c"]))) <= 1e-9)
    ok = (crit.is_critical and psd.min_eig >= -1e-10 and rs.residual <= 1e-8 and matches
          and gr.compat_residual <= 1e-7)
    record(acceptance_log, 5, ok,
           f"criticality {crit.projection_residual:.1e}, min eig {psd.min_eig:.3f}, "
           f"weights {sorted(rs.D_ints)} residual {rs.residual:.1e}, "
           f"gradation {gr.compat_residual:.1e}")


def test_criterion_06_nilradical_round_trip(acceptance_log):
    corpus = [catalog_pair(name) for name in sorted(CATALOG_PAIRS)]
    corpus = [p for p in corpus if criticality_test(p).is_critical] + extension_products()
    worst = 0.0
    for p in corpus:
        _, rep = restrict_nilradical(p)
        worst = max(worst, rep.u_difference, rep.D_difference, rep.criticality_residual)
    record(acceptance_log, 6, worst <= 1e-7,
           f"worst identity residual {worst:.1e} over {len(corpus)} critical pairs")


def test_criterion_07_reductive_part(acceptance_log):
    _, rep = reductive_part_pair(catalog_pair("borel-sl3"))
    worst = max(rep.energy_gap, rep.u_norm, rep.k_difference)
    record(acceptance_log, 7, worst <= 1e-7,
           f"dim l {rep.dim_l}: energy gap {rep.energy_gap:.1e}, u {rep.u_norm:.1e}, "
           f"k {rep.k_difference:.1e}")


def test_criterion_08_semidirect_extension(acceptance_log):
    base = catalog_pair("heisenberg-sl3")
    r = derivation_algebra(base)
    _, rep = semidirect_extend(base, toral_extension(base, r), r)
    ok = (max(rep.jacobi_residual, rep.hom_residual) <= 1e-9 and rep.criticality_residual <= 1e-6
          and rep.spectrum_residual <= 1e-7)
    record(acceptance_log, 8, ok,
           f"residuals {rep.jacobi_residual:.1e}/{rep.hom_residual:.1e}, "
           f"criticality {rep.criticality_residual:.1e}, spectrum {rep.spectrum_residual:.1e}")


def test_criterion_09_mostow(acceptance_log):
    start = time.perf_counter()
    res = kempf_ness_minimize(catalog_pair("principal-sl2-sl3"))
    rep = mostow_involution(res.minimizer)
    elapsed = time.perf_counter() - start
    ok = rep.max_residual <= 1e-6 and elapsed < 60
    record(acceptance_log, 9, ok,
           f"involution {rep.involution_residual:.1e}, automorphism "
           f"{rep.automorphism_residual:.1e}, intertwining {rep.intertwining_residual:.1e}, "
           f"metric {rep.metric_residual:.1e} in {elapsed:.1f} s")


def _flows(name):
    alg = algebra_from_name(name)
    starts = [random_pair("abelian" if s % 2 == 0 else "orbit-perturb", alg, 2, s)
              for s in range(50)]
    return [flow_energy(p) for p in starts]


def test_criterion_10_exceptional_case(acceptance_log):
    sl2_runs = _flows("sl2R")
    sl3_runs = _flows("sl3R")
    sl2_ok = all(r.converged and r.grad_norm <= 1e-6 for r in sl2_runs)
    sl2_min = min(r.limit_energy for r in sl2_runs)
    sl3_closest = min(abs(r.limit_energy - 0.5) for r in sl3_runs)
    ok = sl2_ok and sl2_min > 0.5 + 1e-3 and sl3_closest <= 1e-4
    record(acceptance_log, 10, ok,
           f"sl2R: all converged {sl2_ok}, min energy {sl2_min:.6f}; "
           f"sl3R: closest |E - 1/2| {sl3_closest:.1e}")


CLI_RUNS = [
    ["validate", "random", "--mode", "orbit-perturb", "--n", "3", "--algebra", "sl3R",
     "--seed", "11"],
    ["moment", "random", "--mode", "ambient", "--n", "3", "--seed", "11", "--oracle"],
    ["derivations", "random", "--mode", "subalgebra", "--n", "2", "--seed", "11"],
    ["critical", "heisenberg-sl3"],
    ["flow", "random", "--mode", "abelian", "--n", "2", "--seed", "11", "--trajectory", "{tmp}"],
    ["minimize", "principal-sl2-sl3"],
    ["decompose", "borel-sl3"],
    ["gradation", "heisenberg-sl3"],
    ["reductive", "borel-sl3"],
    ["extend", "heisenberg-sl3"],
    ["mostow", "principal-sl2-sl3", "--minimize"],
    ["classify-abelian", "random", "--mode", "abelian", "--n", "2", "--seed", "11"],
    ["gauge", "sl3R"],
    ["catalog", "emit", "borel-sl3"],
    ["random", "--mode", "orbit-perturb", "--n", "2", "--algebra", "sl3R", "--seed", "11"],
]


def _run_cli(argv, tmp):
    argv = [a.replace("{tmp}", str(tmp)) for a in argv]
    env = dict(os.environ, PYTHONHASHSEED="0")
    proc = subprocess.run([sys.executable, "-m", "liepairs.cli", *argv], capture_output=True,
                          env=env, check=False)
    extra = tmp.read_bytes() if tmp.exists() else b""
    return proc.returncode, proc.stdout, extra


def test_criterion_11_determinism(acceptance_log, tmp_path):
    def twice(i):
        argv = CLI_RUNS[i]
        return [_run_cli(argv, tmp_path / f"run{i}_{k}.csv") for k in range(2)]

    with ThreadPoolExecutor(max_workers=4) as pool:
        outcomes = list(pool.map(twice, range(len(CLI_RUNS))))
    bad = [CLI_RUNS[i][0] for i, (a, b) in enumerate(outcomes) if a != b or a[0] != 0 or not a[1]]
    record(acceptance_log, 11, not bad,
           f"{len(CLI_RUNS)} subcommands run twice, mismatched or failing: {bad or 'none'}")
