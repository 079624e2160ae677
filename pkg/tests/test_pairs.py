import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liepairs import (
    GroupElement,
    Pair,
    ValidationError,
    algebra_from_name,
    catalog_pair,
    derivation_space,
    group_act,
    inf_act,
    pair_adjoint,
    random_pair,
    residuals,
)
from liepairs.algebra import Subspace, centralizer
from liepairs.pairs import is_automorphism, project_to_variety, restrict, vn_inner

seeds = st.integers(0, 2**32 - 1)


def _distance(p, q):
    d = vn_inner(p.mu - q.mu, p.phi - q.phi, p.mu - q.mu, p.phi - q.phi, p.codomain)
    return np.sqrt(d)


def test_pair_rejects_non_antisymmetric_bracket(sl2):
    mu = np.zeros((2, 2, 2))
    mu[0, 1, 0] = 1.0
    with pytest.raises(ValidationError):
        Pair(mu, np.zeros((3, 2)), sl2)


def test_from_entries_requires_ordered_indices(sl2):
    with pytest.raises(ValidationError):
        Pair.from_entries(2, [[1, 0, 0, 1.0]], np.zeros((3, 2)), sl2)


def test_residuals_of_zero_bracket_with_commuting_image(sl2):
    phi = np.zeros((3, 2))
    phi[0, 0], phi[0, 1] = 1.0, -2.0
    assert residuals(Pair(np.zeros((2, 2, 2)), phi, sl2)) == (0.0, 0.0)


def test_identity_pair_is_in_the_variety():
    jac, hom = residuals(catalog_pair("identity-sl2R"))
    assert jac <= 1e-14 and hom <= 1e-14


def test_abelian_source_with_noncommuting_image(sl2):
    phi = np.zeros((3, 2))
    phi[1, 0] = 1.0  # E
    phi[2, 1] = 1.0  # F
    p = Pair(np.zeros((2, 2, 2)), phi, sl2)
    jac, hom = residuals(p)
    assert jac == 0.0
    # [E, F] = H and <H, H> = 8
    assert hom == pytest.approx(np.sqrt(8.0) / p.norm_sq(), rel=1e-12)


def test_identity_element_acts_trivially(heisenberg):
    q = group_act(GroupElement.identity(3, 8), heisenberg)
    assert _distance(q, heisenberg) <= 1e-15


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scalar_action(heisenberg, c):
    q = group_act(GroupElement(c * np.eye(3), np.eye(8)), heisenberg)
    np.testing.assert_allclose(q.mu, heisenberg.mu / c, atol=1e-15)
    np.testing.assert_allclose(q.phi, heisenberg.phi / c, atol=1e-15)


def test_orthogonal_action_preserves_variety(heisenberg, rng):
    from scipy.stats import special_ortho_group

    k = special_ortho_group.rvs(3, random_state=rng)
    q = group_act(GroupElement(k, np.eye(8)), heisenberg)
    assert max(residuals(q)) <= 1e-12


def test_inf_act_examples(heisenberg):
    zero = inf_act(np.zeros((3, 3)), np.zeros(8), heisenberg)
    assert zero.norm() == 0.0
    euler = inf_act(np.eye(3), np.zeros(8), heisenberg)
    np.testing.assert_allclose(euler.dmu, -heisenberg.mu, atol=1e-15)
    np.testing.assert_allclose(euler.dphi, -heisenberg.phi, atol=1e-15)


def test_group_act_singular_rejected(heisenberg):
    with pytest.raises(ValidationError):
        group_act(GroupElement(np.zeros((3, 3)), np.eye(8)), heisenberg)


def test_derivations_of_cartan_line():
    # (a, v) with ad_v H = a H forces a = 0 and v in the centralizer of H
    ds = derivation_space(catalog_pair("cartan-line-sl2R"))
    assert ds.dim == 1
    A, v = ds.basis[0]
    assert abs(A[0, 0]) <= 1e-12
    assert np.allclose(v[1:], 0, atol=1e-12)


def test_derivations_of_semisimple_identity_pair(su2):
    p = catalog_pair("identity-su2")
    cent = centralizer(su2, Subspace(p.phi, su2))
    assert derivation_space(p).dim == cent.dim + p.n == 3


def test_derivations_with_zero_map(sl2):
    p = Pair(sl2.bracket, np.zeros((3, 3)), sl2)
    # der(mu) + g
    assert derivation_space(p).dim == 6


def test_pair_adjoint_examples(su2):
    p = catalog_pair("identity-su2")
    A, v = pair_adjoint(p, np.zeros(3))
    assert not A.any() and not v.any()
    A, v = pair_adjoint(p, np.eye(3)[0])
    assert inf_act(A, v, p).norm() <= 1e-12
    q = catalog_pair("cartan-sl3R")
    A, v = pair_adjoint(q, [0.3, -1.0])
    assert not A.any()
    np.testing.assert_allclose(v, q.phi @ [0.3, -1.0])


def test_restrict_to_the_whole_space_is_a_basis_change(heisenberg):
    q = restrict(heisenberg, np.eye(3)[:, [1, 0, 2]])
    assert max(residuals(q)) <= 1e-14
    assert q.norm_sq() == pytest.approx(heisenberg.norm_sq())


def test_projection_repairs_small_violations(heisenberg, rng):
    mu = heisenberg.mu + 1e-7 * rng.standard_normal((3, 3, 3))
    bad = Pair((mu - mu.transpose(1, 0, 2)) / 2, heisenberg.phi + 1e-7 * rng.standard_normal((8, 3)),
               heisenberg.codomain)
    assert max(residuals(bad)) > 1e-8
    fixed = project_to_variety(bad)
    assert max(residuals(fixed)) <= 1e-12
    assert _distance(fixed, bad) <= 10 * _distance(bad, heisenberg)


def test_automorphism_membership(heisenberg):
    ds = derivation_space(heisenberg)
    A, v = ds.basis[0]
    elem = GroupElement.exp(A, v, heisenberg.codomain)
    assert is_automorphism(elem, heisenberg)
    assert not is_automorphism(GroupElement(2 * np.eye(3), np.eye(8)), heisenberg)


@given(
    name=st.sampled_from(["heisenberg-sl3", "borel-sl2R", "identity-su2", "borel-sl3"]),
    seed=seeds,
)
def test_residuals_are_equivariant(name, seed):
    p = catalog_pair(name)
    rng = np.random.default_rng(seed)
    A = 0.5 * rng.standard_normal((p.n, p.n))
    v = 0.5 * rng.standard_normal(p.codomain.dim)
    assert max(residuals(group_act(GroupElement.exp(A, v, p.codomain), p))) <= 1e-9


@given(
    name=st.sampled_from(["sl2R", "su2", "sl3R"]),
    n=st.integers(1, 4),
    seed=seeds,
)
def test_inf_act_is_the_derivative_of_group_act(name, n, seed):
    alg = algebra_from_name(name)
    p = random_pair("ambient", alg, n, seed)
    rng = np.random.default_rng(seed + 1)
    A = 0.5 * rng.standard_normal((n, n))
    v = 0.5 * rng.standard_normal(alg.dim)
    t = 1e-4
    moved = group_act(GroupElement.exp(t * A, t * v, alg), p)
    tangent = inf_act(A, v, p)
    taylor = Pair(moved.mu - p.mu - t * tangent.dmu, moved.phi - p.phi - t * tangent.dphi, alg)
    assert taylor.norm() <= 1e-6 * p.norm()


@given(
    name=st.sampled_from(["heisenberg-sl3", "borel-sl3", "identity-sl2R", "principal-sl2-sl3"]),
    seed=seeds,
)
def test_derivation_basis_is_annihilated(name, seed):
    base = catalog_pair(name)
    p = random_pair("orbit-perturb", base.codomain, base.n, seed)
    ds = derivation_space(p)
    for A, v in ds.basis:
        assert inf_act(A, v, p).norm() <= 10 * ds.cutoff * p.norm()


@given(
    name=st.sampled_from(["sl2R", "su2", "sl3R"]),
    n=st.integers(1, 3),
    mode=st.sampled_from(["abelian", "subalgebra", "orbit-perturb"]),
    seed=seeds,
)
def test_inner_derivations_lie_in_der(name, n, mode, seed):
    alg = algebra_from_name(name)
    try:
        p = random_pair(mode, alg, n, seed)
    except ValidationError:
        return
    ds = derivation_space(p)
    images = np.array([np.concatenate([a.ravel(), v])
                       for a, v in (pair_adjoint(p, e) for e in np.eye(n))]).T
    assert np.linalg.matrix_rank(images, tol=1e-8) <= ds.dim
    for a, v in (pair_adjoint(p, e) for e in np.eye(n)):
        assert inf_act(a, v, p).norm() <= 1e-8 * max(p.norm_sq(), 1.0)
