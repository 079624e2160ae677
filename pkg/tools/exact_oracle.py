"""Exact-arithmetic reference values for the nilradical and Borel pairs in sl(3, R).

Everything is recomputed from matrices with sympy, independently of the
package: the Killing form from traces of adjoint matrices, an orthonormal
basis by Gram-Schmidt, the moment map from its closed formula, and the
derivation spaces from exact nullspaces.

    python3 tools/exact_oracle.py [--write tests/fixtures/exact_instances.json]
"""
from __future__ import annotations

import argparse
import json
from functools import reduce
from itertools import product
from math import gcd
from pathlib import Path

import sympy as sp

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "exact_instances.json"


def unit(i, j):
    m = sp.zeros(3, 3)
    m[i, j] = 1
    return m


def sl3_basis():
    mats = [sp.diag(1, -1, 0), sp.diag(0, 1, -1)]
    mats += [unit(i, j) for i, j in product(range(3), repeat=2) if i < j]
    mats += [unit(i, j) for i, j in product(range(3), repeat=2) if i > j]
    return mats


def coords(x, basis):
    syms = sp.symbols(f"c0:{len(basis)}")
    expr = sum((s * b for s, b in zip(syms, basis)), sp.zeros(3, 3)) - x
    sol = sp.solve(list(expr), syms, dict=True)[0]
    return sp.Matrix([sol.get(s, 0) for s in syms])


def bracket(x, y):
    return x * y - y * x


def theta(x):
    return -x.T


def killing(x, y, basis):
    ad_x = sp.Matrix.hstack(*[coords(bracket(x, b), basis) for b in basis])
    ad_y = sp.Matrix.hstack(*[coords(bracket(y, b), basis) for b in basis])
    return (ad_x * ad_y).trace()


class Sl3:
    def __init__(self):
        self.basis = sl3_basis()
        # <X, Y> = -B(theta X, Y) is a multiple of the trace form; read it off once
        scale = -killing(theta(self.basis[2]), self.basis[2], self.basis)
        self.scale = sp.nsimplify(scale)

    def inner(self, x, y):
        return self.scale * (x.T * y).trace()


def gram_schmidt(vectors, inner):
    out = []
    for v in vectors:
        w = v
        for q in out:
            w = w - inner(q, v) * q
        out.append(sp.simplify(w / sp.sqrt(inner(w, w))))
    return out


def exact_instance(name, span):
    g = Sl3()
    q = gram_schmidt(span, g.inner)
    n = len(q)
    mu = [[[sp.simplify(g.inner(q[k], bracket(q[i], q[j]))) for k in range(n)]
           for j in range(n)] for i in range(n)]
    norm_mu = sum(mu[i][j][k] ** 2 for i in range(n) for j in range(i + 1, n) for k in range(n))
    norm_phi = sum(g.inner(x, x) for x in q)
    nsq = sp.simplify(norm_mu + norm_phi)

    M = sp.zeros(n, n)
    for a, b in product(range(n), repeat=2):
        val = sp.Rational(1, 2) * sum(mu[i][j][a] * mu[i][j][b] for i in range(n) for j in range(n))
        val -= sum(mu[a][i][k] * mu[b][i][k] for i in range(n) for k in range(n))
        val -= g.inner(q[a], q[b])
        M[a, b] = sp.simplify(val)
    u = sp.simplify(sum((bracket(theta(x), x) for x in q), sp.zeros(3, 3)))
    msq = sp.simplify(sum(M[i, j] ** 2 for i in range(n) for j in range(n)) + g.inner(u, u))
    k = sp.simplify(msq / nsq)
    D = sp.simplify(M + k * sp.eye(n))
    energy = sp.simplify(k / nsq)

    d_eigs = sorted(sp.simplify(e / k) for e, m in D.eigenvals().items() for _ in range(m))
    basis = g.basis
    ad_u = sp.Matrix.hstack(*[coords(bracket(u, b), basis) for b in basis])
    a_eigs = sorted(sp.simplify(e / k) for e, m in ad_u.eigenvals().items() for _ in range(m))
    allv = [sp.Rational(x) for x in d_eigs + a_eigs]
    nonzero = [x for x in allv if x != 0]
    den = reduce(sp.ilcm, [x.q for x in nonzero], 1)
    num = reduce(gcd, [abs(x.p) * (den // x.q) for x in nonzero], 0)
    c = sp.Rational(den, num)

    der_dim, r_dim = derivation_dims(mu, q, basis)
    return {
        "name": name,
        "n": n,
        "norm_sq": str(nsq),
        "k": str(k),
        "energy": str(energy),
        "M_eigenvalues": [str(sp.nsimplify(e)) for e in sorted(
            e for e, m in M.eigenvals().items() for _ in range(m))],
        "D_eigenvalues": [str(sp.simplify(e * k)) for e in d_eigs],
        "u_matrix": [[str(u[i, j]) for j in range(3)] for i in range(3)],
        "c": str(c),
        "D_weights": [int(c * x) for x in d_eigs],
        "adu_weights": [int(c * x) for x in a_eigs],
        "der_dim": der_dim,
        "r_dim": r_dim,
    }


def derivation_dims(mu, q, basis):
    """dim der and dim (der intersected with its image under (A, v) -> (-A^T, theta v))."""
    n = len(q)
    d = len(basis)
    A = sp.Matrix(n, n, sp.symbols(f"a0:{n * n}"))
    v = sp.symbols(f"v0:{d}")
    vm = sum((s * b for s, b in zip(v, basis)), sp.zeros(3, 3))
    unknowns = list(A) + list(v)
    eqs = []
    for i, j in product(range(n), repeat=2):
        if i >= j:
            continue
        mu_ij = sp.Matrix([mu[i][j][kk] for kk in range(n)])
        # A mu(e_i, e_j) - mu(A e_i, e_j) - mu(e_i, A e_j)
        lhs = A * mu_ij
        for l in range(n):
            lhs -= A[l, i] * sp.Matrix([mu[l][j][kk] for kk in range(n)])
            lhs -= A[l, j] * sp.Matrix([mu[i][l][kk] for kk in range(n)])
        eqs.extend(list(lhs))
    for j in range(n):
        phi_ae = sum((A[l, j] * q[l] for l in range(n)), sp.zeros(3, 3))
        eqs.extend(list(bracket(vm, q[j]) - phi_ae))
    system = sp.Matrix([[sp.diff(eq, x) for x in unknowns] for eq in eqs])
    null = system.nullspace()
    der_dim = len(null)
    # theta~ on the unknowns: A -> -A^T, v -> coords(theta(v))
    images = []
    for vec in null:
        Av = sp.Matrix(n, n, list(vec[: n * n]))
        vv = sum((vec[n * n + i] * basis[i] for i in range(d)), sp.zeros(3, 3))
        tv = coords(theta(vv), basis)
        images.append(sp.Matrix(list(-Av.T) + list(tv)))
    if not null:
        return 0, 0
    span_sum = sp.Matrix.hstack(*null, *images).rank()
    return der_dim, 2 * der_dim - span_sum


def compute():
    h = [unit(0, 1), unit(1, 2), unit(0, 2)]
    b = [sp.diag(1, -1, 0), sp.diag(0, 1, -1)] + h
    return {
        "heisenberg-sl3": exact_instance("heisenberg-sl3", h),
        "borel-sl3": exact_instance("borel-sl3", b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--write", nargs="?", const=str(DEFAULT_OUT), default=None,
                        help="write the fixture file (default path if no value)")
    args = parser.parse_args()
    text = json.dumps(compute(), indent=2, sort_keys=True) + "\n"
    if args.write:
        Path(args.write).write_text(text, encoding="utf-8")
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
