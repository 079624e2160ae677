"""Built-in pairs and seeded random generators."""
from __future__ import annotations

import numpy as np
from scipy.stats import special_ortho_group

from .algebra import (
    QuadraticLieAlgebra,
    adjoint,
    direct_product,
    sl_real,
    sl_real_matrices,
    su2,
)
from .errors import CatalogError, ValidationError
from .linalg import numerical_kernel, orthonormalize
from .pairs import GroupElement, Pair, group_act

RANDOM_MODES = ("abelian", "subalgebra", "orbit-perturb", "ambient")


def matrix_coords(mats, m):
    """Coordinates of m x m traceless matrices in the sl(m, R) basis."""
    flat = np.array([b.ravel() for b in sl_real_matrices(m)]).T
    cols = [np.linalg.lstsq(flat, np.asarray(x, dtype=float).ravel(), rcond=None)[0] for x in mats]
    return np.array(cols).T


def subalgebra_pair(alg: QuadraticLieAlgebra, vectors, tol=1e-10) -> Pair:
    """Isometric inclusion of the subalgebra spanned by the columns of ``vectors``."""
    q = orthonormalize(np.asarray(vectors, dtype=float).reshape(alg.dim, -1), alg.gram)
    n = q.shape[1]
    mu = np.zeros((n, n, n))
    coef = q.T @ alg.gram
    for i in range(n):
        for j in range(n):
            z = alg.br(q[:, i], q[:, j])
            mu[i, j] = coef @ z
            if np.linalg.norm(z - q @ mu[i, j]) > tol * max(1.0, np.abs(alg.bracket).max()):
                raise ValidationError("vectors do not span a subalgebra")
    mu = (mu - mu.transpose(1, 0, 2)) / 2
    return Pair(mu, q, alg)


def _unit(m, i, j):
    e = np.zeros((m, m))
    e[i, j] = 1.0
    return e


def _sl3_vectors(*mats):
    return matrix_coords(mats, 3)


def _heisenberg_sl3():
    return subalgebra_pair(sl_real(3), _sl3_vectors(_unit(3, 0, 1), _unit(3, 1, 2), _unit(3, 0, 2)))


def _borel_sl3():
    h1 = np.diag([1.0, -1.0, 0.0])
    h2 = np.diag([0.0, 1.0, -1.0])
    return subalgebra_pair(
        sl_real(3), _sl3_vectors(h1, h2, _unit(3, 0, 1), _unit(3, 1, 2), _unit(3, 0, 2))
    )


def _principal_sl2_sl3():
    """sl(2, R) in its raw {H, E, F} basis, mapped by the principal embedding."""
    s = sl_real(2)
    h = np.diag([2.0, 0.0, -2.0])
    e = _unit(3, 0, 1) + _unit(3, 1, 2)
    f = 2 * (_unit(3, 1, 0) + _unit(3, 2, 1))
    return Pair(s.bracket, _sl3_vectors(h, e, f), sl_real(3))


def _su2_plus_line():
    """su(2) + R into su(2) x su(2); the line goes to a Cartan of the second factor."""
    g = direct_product(su2(), su2())
    base = subalgebra_pair(su2(), np.eye(3))
    mu = np.zeros((4, 4, 4))
    mu[:3, :3, :3] = base.mu
    phi = np.zeros((6, 4))
    phi[:3, :3] = base.phi
    f1 = np.zeros(6)
    f1[3] = 1.0
    phi[:, 3] = np.sqrt(1.5) * f1 / g.norm(f1)
    return Pair(mu, phi, g)


CATALOG_PAIRS = {
    "identity-su2": lambda: subalgebra_pair(su2(), np.eye(3)),
    "identity-sl2R": lambda: subalgebra_pair(sl_real(2), np.eye(3)),
    "cartan-line-sl2R": lambda: subalgebra_pair(sl_real(2), np.eye(3)[:, :1]),
    "cartan-sl3R": lambda: subalgebra_pair(sl_real(3), np.eye(8)[:, :2]),
    "borel-sl2R": lambda: subalgebra_pair(sl_real(2), np.eye(3)[:, :2]),
    "heisenberg-sl3": _heisenberg_sl3,
    "borel-sl3": _borel_sl3,
    "principal-sl2-sl3": _principal_sl2_sl3,
    "su2-plus-line": _su2_plus_line,
}


def catalog_pair(name: str) -> Pair:
    try:
        return CATALOG_PAIRS[name]()
    except KeyError:
        raise CatalogError(f"unknown catalog pair {name!r}") from None


def _subalgebra_candidates(alg: QuadraticLieAlgebra, n: int):
    """Catalog subalgebra inclusions of dimension ``n`` into ``alg``."""
    out = []
    for name in CATALOG_PAIRS:
        p = catalog_pair(name)
        if p.n == n and p.codomain.label == alg.label:
            out.append(p)
    if alg.cartan is not None and alg.cartan.shape[1] >= n and n > 0:
        out.append(subalgebra_pair(alg, alg.cartan[:, :n]))
    if n == alg.dim:
        out.append(subalgebra_pair(alg, np.eye(alg.dim)))
    return out


def _random_orthogonal(n, rng):
    if n == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return special_ortho_group.rvs(n, random_state=rng)


def random_pair(mode: str, alg: QuadraticLieAlgebra, n: int, seed: int) -> Pair:
    """Seeded pair generator.

    ``abelian`` draws phi with image in the centralizer of a random element
    (so the image commutes and the pair lies in the variety); its rank is
    random.  ``subalgebra`` rotates a catalog inclusion of dimension ``n``;
    ``orbit-perturb`` moves such an inclusion by exp of a random element of
    gl(n) + g; ``ambient`` is an unconstrained point of V_n.
    """
    if mode not in RANDOM_MODES:
        raise ValidationError(f"unknown random mode {mode!r}")
    if n < 1:
        raise ValidationError("n must be positive")
    rng = np.random.default_rng(seed)
    d = alg.dim
    if mode == "ambient":
        mu = rng.standard_normal((n, n, n))
        return Pair(mu - mu.transpose(1, 0, 2), rng.standard_normal((d, n)), alg)
    if mode == "abelian":
        x = rng.standard_normal(d)
        cent, _ = numerical_kernel(adjoint(alg, x))
        rank = int(rng.integers(1, min(n, cent.shape[1]) + 1))
        coeffs = rng.standard_normal((cent.shape[1], rank)) @ rng.standard_normal((rank, n))
        return Pair(np.zeros((n, n, n)), cent @ coeffs, alg)
    cands = _subalgebra_candidates(alg, n)
    if not cands:
        raise CatalogError(f"no catalog subalgebra of dimension {n} in {alg.label}")
    base = cands[int(rng.integers(len(cands)))]
    if mode == "subalgebra":
        k = _random_orthogonal(n, rng)
        return group_act(GroupElement(k, np.eye(d)), base)
    A = 0.5 * rng.standard_normal((n, n))
    v = 0.5 * rng.standard_normal(d)
    return group_act(GroupElement.exp(A, v, alg), base)
