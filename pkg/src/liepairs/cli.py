"""Command-line interface: ``liepairs <command> ...``.

Exit codes: 0 success, 1 validation failure, 2 numerical failure,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .algebra import algebra_from_name, validate_algebra
from .errors import CatalogError, NumericalError, ValidationError
from .flow import FlowOptions, assign_strata, flow_energy, kempf_ness_minimize
from .instances import CATALOG_PAIRS, RANDOM_MODES, catalog_pair, random_pair
from .moment import moment_definitional, moment_explicit
from .pairs import derivation_space, residuals
from .structure import (
    abelian_classify,
    criticality_test,
    derivation_algebra,
    gradation,
    levi_decompose,
    minimal_metric_gauge,
    mostow_involution,
    psd_check,
    rational_spectrum,
    reductive_part_pair,
    restrict_nilradical,
    semidirect_extend,
    theta_invariant_derivations,
    toral_extension,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

TOL_PROFILES = {
    "default": 1.0,
    "strict": 0.01,
    "loose": 100.0,
}
PROFILE_ENV = "LIEPAIRS_TOL_PROFILE"


def _profile_factor():
    name = os.environ.get(PROFILE_ENV, "default")
    if name not in TOL_PROFILES:
        raise ValidationError(f"{PROFILE_ENV} must be one of {sorted(TOL_PROFILES)}")
    return TOL_PROFILES[name]


def _tol(args, default):
    return args.tol if getattr(args, "tol", None) is not None else default * _profile_factor()


def load_pair(source, args):
    """A pair from a file path, a catalog name, or ``random``."""
    if source == "random":
        alg = algebra_from_name(args.algebra)
        return random_pair(args.mode, alg, args.n, args.seed), args.mode != "ambient"
    if source in CATALOG_PAIRS:
        return catalog_pair(source), True
    obj = io.read_json(source)
    return io.pair_from_dict(obj), bool(obj.get("in_variety", True))


def _flow_options(args):
    return FlowOptions(
        step_init=args.step,
        tol_grad=_tol(args, 1e-8),
        max_steps=args.max_steps,
        residual_guard=args.guard,
        record_every=args.record_every,
    )


# -- commands ---------------------------------------------------------------

def cmd_validate(args):
    p, in_variety = load_pair(args.pair, args)
    alg_report = validate_algebra(p.codomain)
    jac, hom = residuals(p)
    tol = _tol(args, 1e-9)
    member = max(jac, hom) <= tol
    report = {
        "algebra": alg_report,
        "jacobi_residual": jac,
        "hom_residual": hom,
        "in_variety_claimed": in_variety,
        "in_variety": member,
        "tolerance": tol,
    }
    ok = alg_report.ok and (member or not in_variety)
    return report, EXIT_OK if ok else EXIT_VALIDATION


def cmd_moment(args):
    p, _ = load_pair(args.pair, args)
    mv = moment_explicit(p)
    fields = {k: v for k, v in io.to_jsonable(mv).items() if k != "codomain"}
    report = {"moment": fields, "trace_identity_residual": mv.trace_identity_residual(),
              "u_in_p_residual": mv.u_in_p_residual()}
    if args.oracle:
        mo = moment_definitional(p)
        diff = np.sqrt(np.sum((mv.M_gl - mo.M_gl) ** 2) + p.codomain.norm(mv.u - mo.u) ** 2)
        report["oracle_discrepancy"] = float(diff / mv.norm_pair_sq)
    return report, EXIT_OK


def cmd_derivations(args):
    p, _ = load_pair(args.pair, args)
    ds = derivation_space(p, _tol(args, 1e-8))
    report = {"dim": ds.dim, "cutoff": ds.cutoff, "singular_values": ds.singular_values,
              "basis": [{"A": a, "v": v} for a, v in ds.basis]}
    return report, EXIT_OK


def cmd_critical(args):
    p, _ = load_pair(args.pair, args)
    rep = criticality_test(p, _tol(args, 1e-6))
    return {"criticality": rep, "psd": psd_check(p)}, EXIT_OK


def _flow_one(payload):
    pair_dict, opts = payload
    res = flow_energy(io.pair_from_dict(pair_dict), opts)
    return res


def _flow_report(res, seed=None):
    out = {
        "limit": res.limit,
        "limit_energy": res.limit_energy,
        "stratum_label": res.stratum_label,
        "steps": res.steps,
        "converged": res.converged,
        "grad_norm": res.grad_norm,
    }
    if seed is not None:
        out["seed"] = seed
    return out


def _seed_range(text):
    lo, _, hi = text.partition(":")
    return list(range(int(lo), int(hi)))


def cmd_flow(args):
    opts = _flow_options(args)
    if args.seeds:
        if args.pair != "random":
            raise ValidationError("--seeds needs the pair argument 'random'")
        seeds = _seed_range(args.seeds)
        alg = algebra_from_name(args.algebra)
        payloads = [(io.pair_to_dict(random_pair(args.mode, alg, args.n, s)), opts) for s in seeds]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_flow_one, payloads))
        else:
            results = [_flow_one(x) for x in payloads]
        results = assign_strata(results)
        report = {"runs": [_flow_report(r, s) for r, s in zip(results, seeds)],
                  "strata": sorted({r.stratum_label for r in results})}
        ok = all(r.converged for r in results)
        return report, EXIT_OK if ok else EXIT_NUMERICAL
    p, _ = load_pair(args.pair, args)
    res = flow_energy(p, opts)
    if args.trajectory:
        io.write_trajectory(args.trajectory, res.trajectory)
    return _flow_report(res), EXIT_OK if res.converged else EXIT_NUMERICAL


def cmd_minimize(args):
    p, _ = load_pair(args.pair, args)
    res = kempf_ness_minimize(p, args.subgroup, _flow_options(args))
    report = {
        "minimizer": res.minimizer,
        "group_log": res.group_log,
        "final_norm": res.final_norm,
        "initial_norm": res.norm_history[0],
        "verdict": res.verdict,
        "moment_residual": res.moment_residual,
        "steps": res.steps,
        "energy": moment_explicit(res.minimizer).energy,
    }
    return report, EXIT_NUMERICAL if res.verdict == "inconclusive" else EXIT_OK


def cmd_decompose(args):
    p, _ = load_pair(args.pair, args)
    ld = levi_decompose(p)
    sub, rep = restrict_nilradical(p)
    report = {"levi": ld, "nilradical_pair": sub if sub.n else None, "restriction": rep}
    return report, EXIT_OK


def cmd_gradation(args):
    p, _ = load_pair(args.pair, args)
    rs = rational_spectrum(p, args.max_den)
    gr = gradation(p, args.max_den)
    return {"rational_spectrum": rs, "gradation": gr}, EXIT_OK


def cmd_reductive(args):
    p, _ = load_pair(args.pair, args)
    new, rep = reductive_part_pair(p)
    return {"pair": new, "check": rep}, EXIT_OK


def cmd_extend(args):
    base, _ = load_pair(args.pair, args)
    r = derivation_algebra(base)
    if args.ext:
        ext = io.read_pair(args.ext)
    else:
        ext = toral_extension(base, r)
    prod, rep = semidirect_extend(base, ext, r)
    return {"pair": prod, "check": rep, "ext_algebra": r.algebra}, EXIT_OK


def cmd_mostow(args):
    p, _ = load_pair(args.pair, args)
    log = None
    if args.minimize:
        res = kempf_ness_minimize(p, "det1", _flow_options(args))
        p, log = res.minimizer, res.group_log
    rep = mostow_involution(p, _tol(args, 1e-6))
    report = {"pair": p, "report": rep, "group_log": log, "ok": rep.max_residual <= _tol(args, 1e-6)}
    return report, EXIT_OK if report["ok"] else EXIT_NUMERICAL


def cmd_classify_abelian(args):
    p, _ = load_pair(args.pair, args)
    return abelian_classify(p), EXIT_OK


def cmd_gauge(args):
    alg = algebra_from_name(args.algebra_name)
    res = minimal_metric_gauge(alg.bracket, alg.involution)
    return res, EXIT_OK


FIXTURE_PAIRS = ("heisenberg-sl3", "borel-sl3")


def fixture_values(name):
    """Numerical counterparts of the frozen exact values for a catalog pair."""
    p = catalog_pair(name)
    mv = moment_explicit(p)
    rs = rational_spectrum(p)
    return {
        "name": name,
        "n": p.n,
        "norm_sq": mv.norm_pair_sq,
        "k": mv.k,
        "energy": mv.energy,
        "M_eigenvalues": sorted(np.linalg.eigvalsh(mv.M_gl).tolist()),
        "D_eigenvalues": sorted(np.linalg.eigvalsh(mv.D).tolist()),
        "u": mv.u,
        "c": rs.c,
        "D_weights": sorted(int(x) for x in rs.D_ints),
        "adu_weights": sorted(int(x) for x in rs.adu_ints),
        "der_dim": derivation_space(p).dim,
        "r_dim": theta_invariant_derivations(p).dim,
    }


def cmd_catalog(args):
    if args.fixtures:
        return {name: fixture_values(name) for name in FIXTURE_PAIRS}, EXIT_OK
    if args.action == "list":
        return {"pairs": sorted(CATALOG_PAIRS)}, EXIT_OK
    if not args.name:
        raise ValidationError("catalog emit needs a name")
    return io.pair_to_dict(catalog_pair(args.name)), EXIT_OK


def cmd_random(args):
    alg = algebra_from_name(args.algebra)
    p = random_pair(args.mode, alg, args.n, args.seed)
    return io.pair_to_dict(p, in_variety=args.mode != "ambient"), EXIT_OK


COMMANDS = {
    "validate": (cmd_validate, "residuals of the defining equations and algebra checks"),
    "moment": (cmd_moment, "moment map, k, (D, u) and energy"),
    "derivations": (cmd_derivations, "orthonormal basis of the pair derivations"),
    "critical": (cmd_critical, "criticality test and spectrum of D"),
    "flow": (cmd_flow, "negative gradient flow of the energy"),
    "minimize": (cmd_minimize, "norm minimization along the group orbit"),
    "decompose": (cmd_decompose, "Levi splitting and nilradical restriction"),
    "gradation": (cmd_gradation, "rational spectrum and gradations"),
    "reductive": (cmd_reductive, "pair on ker D into gc(dim n, g)"),
    "extend": (cmd_extend, "semi-direct extension of a nilpotent critical pair"),
    "mostow": (cmd_mostow, "compatible Cartan involution of a minimal pair"),
    "classify-abelian": (cmd_classify_abelian, "minimality criteria for abelian pairs"),
    "gauge": (cmd_gauge, "metric gauge of a semi-simple bracket"),
    "catalog": (cmd_catalog, "list or emit built-in pairs"),
    "random": (cmd_random, "emit a seeded random pair"),
}

_PAIR_COMMANDS = {"validate", "moment", "derivations", "critical", "flow", "minimize",
                  "decompose", "gradation", "reductive", "extend", "mostow", "classify-abelian"}
_FLOW_COMMANDS = {"flow", "minimize", "mostow"}


def _add_random_args(p, required=False):
    p.add_argument("--mode", choices=RANDOM_MODES, default="subalgebra",
                   help="random generator mode (default: subalgebra)")
    p.add_argument("--n", type=int, default=2, help="source dimension (default: 2)")
    p.add_argument("--algebra", default="sl2R", help="codomain algebra name (default: sl2R)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")


def build_parser():
    parser = argparse.ArgumentParser(prog="liepairs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext, description=helptext)
        if name in _PAIR_COMMANDS:
            p.add_argument("pair", help="pair file, catalog name, or 'random'")
            _add_random_args(p)
            p.add_argument("--tol", type=float, default=None, help="tolerance override")
        if name in _FLOW_COMMANDS:
            p.add_argument("--step", type=float, default=1e-2, help="initial step (default: 1e-2)")
            p.add_argument("--max-steps", type=int, default=200_000, help="iteration cap")
            p.add_argument("--guard", type=float, default=1e-6, help="residual guard")
            p.add_argument("--record-every", type=int, default=1, help="trajectory sampling")
        p.add_argument("--output", "-o", default=None, help="write the report here")
        p.add_argument("--format", choices=("structured", "text"), default="structured",
                       help="report format (default: structured)")
    sub.choices["moment"].add_argument("--oracle", action="store_true",
                                       help="cross-check against the definitional moment map")
    flow = sub.choices["flow"]
    flow.add_argument("--trajectory", default=None, help="CSV file for the trajectory")
    flow.add_argument("--seeds", default=None, help="seed range A:B for random starts")
    flow.add_argument("--jobs", type=int, default=1, help="worker processes for --seeds")
    sub.choices["minimize"].add_argument("--subgroup", choices=("det1", "full"), default="det1")
    sub.choices["mostow"].add_argument("--minimize", action="store_true",
                                       help="run the det1 minimization first")
    sub.choices["gradation"].add_argument("--max-den", type=int, default=64)
    sub.choices["extend"].add_argument("--ext", default=None,
                                       help="extension pair file (default: toral line)")
    sub.choices["gauge"].add_argument("algebra_name", help="semi-simple algebra, e.g. sl2R")
    cat = sub.choices["catalog"]
    cat.add_argument("action", nargs="?", choices=("list", "emit"), default="list")
    cat.add_argument("--fixtures", action="store_true",
                     help="emit computed values for the frozen exact instances")
    cat.add_argument("name", nargs="?", default=None)
    _add_random_args(sub.choices["random"])
    return parser


def _text(obj, prefix=""):
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            val = obj[key]
            if isinstance(val, (dict, list)) and val and not _flat(val):
                lines.append(f"{prefix}{key}:")
                lines.extend(_text(val, prefix + "  "))
            else:
                lines.append(f"{prefix}{key}: {json.dumps(val)}")
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            lines.append(f"{prefix}- [{i}]")
            lines.extend(_text(val, prefix + "  "))
    else:
        lines.append(f"{prefix}{json.dumps(obj)}")
    return lines


def _flat(val):
    if isinstance(val, dict):
        return False
    return all(not isinstance(x, (dict, list)) for x in val)


def render(report, fmt):
    if fmt == "text":
        return "\n".join(_text(io.to_jsonable(report))) + "\n"
    return io.dumps(report)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        report, code = handler(args)
        text = render(report, args.format)
        if args.output:
            io.write_text(args.output, text)
        else:
            sys.stdout.write(text)
        return code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, CatalogError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
