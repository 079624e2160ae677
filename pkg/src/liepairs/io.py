"""JSON files for algebras, pairs and reports; CSV trajectories."""
from __future__ import annotations

import csv
import dataclasses
import json

import numpy as np

from .algebra import QuadraticLieAlgebra, algebra_from_name, killing_form
from .errors import CatalogError, ValidationError
from .pairs import GroupElement, Pair

TRAJECTORY_COLUMNS = ("step", "energy", "grad_norm", "jacobi_res", "hom_res", "norm")


def _quadruples(tensor):
    n = tensor.shape[0]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                v = float(tensor[i, j, k])
                if v != 0.0:
                    out.append([i, j, k, v])
    return out


def _matrix(arr):
    return [[float(x) for x in row] for row in np.asarray(arr)]


def _same_algebra(a: QuadraticLieAlgebra, b: QuadraticLieAlgebra) -> bool:
    return (
        a.dim == b.dim
        and np.array_equal(a.bracket, b.bracket)
        and np.array_equal(a.form, b.form)
        and np.array_equal(a.involution, b.involution)
        and np.array_equal(a.gram, b.gram)
    )


def algebra_to_dict(alg: QuadraticLieAlgebra):
    """A bare name when the label rebuilds the same algebra, else an inline object."""
    try:
        if _same_algebra(algebra_from_name(alg.label), alg):
            return alg.label
    except CatalogError:
        pass
    form = "killing" if np.array_equal(alg.form, killing_form(alg.bracket)) else _matrix(alg.form)
    return {
        "name": alg.label,
        "dim": alg.dim,
        "structure_constants": _quadruples(alg.bracket),
        "form": form,
        "involution": _matrix(alg.involution),
    }


def algebra_from_dict(obj) -> QuadraticLieAlgebra:
    if isinstance(obj, str):
        return algebra_from_name(obj)
    try:
        dim = int(obj["dim"])
        entries = obj["structure_constants"]
        theta = np.asarray(obj["involution"], dtype=float).reshape(dim, dim)
        form = obj.get("form", "killing")
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed algebra object: {exc}") from None
    c = np.zeros((dim, dim, dim))
    explicit = set()
    for i, j, k, v in entries:
        c[int(i), int(j), int(k)] = float(v)
        explicit.add((int(i), int(j), int(k)))
    for i, j, k in list(explicit):
        if i < j and (j, i, k) not in explicit:
            c[j, i, k] = -c[i, j, k]
    asym = float(np.max(np.abs(c + c.transpose(1, 0, 2)))) if dim else 0.0
    if asym > 0:
        raise ValidationError(f"structure constants are not antisymmetric (residual {asym:g})")
    beta = killing_form(c) if form == "killing" else np.asarray(form, dtype=float)
    return QuadraticLieAlgebra(c, beta, theta, label=str(obj.get("name", "algebra")))


def pair_to_dict(p: Pair, in_variety=True):
    return {
        "n": p.n,
        "algebra": algebra_to_dict(p.codomain),
        "mu": _quadruples(p.mu),
        "phi": _matrix(p.phi),
        "in_variety": bool(in_variety),
    }


def pair_from_dict(obj) -> Pair:
    try:
        n = int(obj["n"])
        alg = algebra_from_dict(obj["algebra"])
        entries = obj["mu"]
        phi = np.asarray(obj["phi"], dtype=float).reshape(alg.dim, n)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed pair object: {exc}") from None
    for entry in entries:
        if len(entry) != 4 or not 0 <= int(entry[0]) < int(entry[1]) < n or not 0 <= int(entry[2]) < n:
            raise ValidationError(f"bad bracket entry {entry!r}")
    return Pair.from_entries(n, entries, phi, alg)


def to_jsonable(obj):
    """Plain JSON data for reports built from dataclasses, arrays and pairs."""
    if isinstance(obj, Pair):
        return pair_to_dict(obj)
    if isinstance(obj, QuadraticLieAlgebra):
        return algebra_to_dict(obj)
    if isinstance(obj, GroupElement):
        return {"gl_part": _matrix(obj.gl_part), "inner_part": _matrix(obj.inner_part)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in dir(type(obj)):
            if isinstance(getattr(type(obj), name, None), property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_pair(path) -> Pair:
    return pair_from_dict(read_json(path))


def write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_trajectory(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for r in records:
            writer.writerow([r.step, repr(r.energy), repr(r.grad_norm), repr(r.jacobi_res),
                             repr(r.hom_res), repr(r.norm)])
