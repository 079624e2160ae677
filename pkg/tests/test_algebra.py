import numpy as np
import pytest
from scipy.linalg import expm
from hypothesis import given
from hypothesis import strategies as st

from liepairs import (
    CatalogError,
    QuadraticLieAlgebra,
    ValidationError,
    Subspace,
    adjoint,
    algebra_from_name,
    catalog,
    centralizer,
    killing_form,
    validate_algebra,
)

CATALOG_NAMES = ["sl2R", "su2", "so3", "sl3R", "sl4R", "product(su2,sl2R)", "gc(2,sl2R)"]


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_algebras_validate(name):
    report = validate_algebra(algebra_from_name(name))
    assert report.ok, report.failures()


def test_sl2_residuals_are_exact(sl2):
    report = validate_algebra(sl2)
    for key, (value, _) in report.residuals.items():
        if key != "gram_min_eigenvalue":
            assert value < 1e-14


def test_identity_involution_breaks_positivity(sl2):
    bad = QuadraticLieAlgebra(sl2.bracket, sl2.form, np.eye(3))
    report = validate_algebra(bad)
    assert not report.ok
    assert report.failures() == ["gram_min_eigenvalue"]
    # <H, H> = -B(H, H) = -8
    assert bad.gram[0, 0] == pytest.approx(-8.0)


def test_one_sided_structure_constant_is_not_antisymmetric():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1.0
    report = validate_algebra(QuadraticLieAlgebra(c, np.eye(3), np.eye(3)))
    assert not report.ok
    assert report.residuals["antisymmetry"][0] == 1.0


def test_sl2_killing_form(sl2):
    B = killing_form(sl2.bracket)
    # basis H, E, F
    assert B[0, 0] == pytest.approx(8.0)
    assert B[1, 2] == pytest.approx(4.0)
    assert B[1, 1] == 0.0


def test_abelian_killing_form_vanishes():
    assert np.array_equal(killing_form(np.zeros((4, 4, 4))), np.zeros((4, 4)))


def test_su2_killing_form(su2):
    np.testing.assert_allclose(killing_form(su2.bracket), -2 * np.eye(3), atol=1e-15)


def test_adjoint_examples(sl2, su2):
    assert np.array_equal(adjoint(sl2, np.zeros(3)), np.zeros((3, 3)))
    np.testing.assert_allclose(adjoint(sl2, [1.0, 0, 0]), np.diag([0.0, 2.0, -2.0]))
    rot = adjoint(su2, [1.0, 0, 0])
    np.testing.assert_allclose(rot @ [0, 1.0, 0], [0, 0, 1.0])
    np.testing.assert_allclose(rot @ [0, 0, 1.0], [0, -1.0, 0])


def test_centralizer_examples(sl2):
    whole = centralizer(sl2, Subspace(np.eye(3), sl2))
    assert whole.dim == 0
    line = centralizer(sl2, Subspace(np.array([[1.0], [0], [0]]), sl2))
    assert line.dim == 1
    assert abs(line.basis[0, 0]) > 0 and np.allclose(line.basis[1:, 0], 0)
    assert centralizer(sl2, Subspace(np.zeros((3, 0)), sl2)).dim == 3


def test_catalog_constructors():
    sl = catalog("sl", 2)
    assert sl.dim == 3 and killing_form(sl.bracket)[0, 0] == pytest.approx(8.0)
    gc = catalog("gc", 2, "sl2R")
    assert gc.dim == 7
    np.testing.assert_allclose(gc.gram[:4, :4], np.eye(4))
    np.testing.assert_allclose(gc.gram[4:, 4:], sl.gram)
    assert np.all(gc.gram[:4, 4:] == 0)
    prod = catalog("product", "su2", "su2")
    assert prod.dim == 6
    np.testing.assert_allclose(killing_form(prod.bracket), -2 * np.eye(6), atol=1e-15)


def test_unknown_names_raise():
    with pytest.raises(CatalogError):
        algebra_from_name("e8")
    with pytest.raises(CatalogError):
        catalog("sl")


def test_cartan_decomposition_dimensions(sl3):
    assert sl3.k_basis().shape[1] == 3
    assert sl3.p_basis().shape[1] == 5


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_form_is_ad_invariant(name):
    alg = algebra_from_name(name)
    c, beta = alg.bracket, alg.form
    inv = np.einsum("ijl,lk->ijk", c, beta) + np.einsum("ikl,jl->ijk", c, beta)
    assert np.max(np.abs(inv)) <= 1e-10


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_adjoint_transpose_is_minus_ad_theta(name):
    alg = algebra_from_name(name)
    G = alg.gram
    for v in np.eye(alg.dim):
        ad = adjoint(alg, v)
        gram_adjoint = np.linalg.solve(G, ad.T @ G)
        assert np.max(np.abs(gram_adjoint + adjoint(alg, alg.theta(v)))) <= 1e-10


def test_product_killing_form_is_block_sum():
    a, b = algebra_from_name("sl2R"), algebra_from_name("su2")
    prod = catalog("product", a, b)
    B = killing_form(prod.bracket)
    assert np.array_equal(B[:3, :3], killing_form(a.bracket))
    assert np.array_equal(B[3:, 3:], killing_form(b.bracket))
    assert np.all(B[:3, 3:] == 0)


@given(
    name=st.sampled_from(["sl2R", "su2", "sl3R"]),
    seed=st.integers(0, 2**32 - 1),
    m=st.integers(0, 3),
)
def test_centralizer_commutes(name, seed, m):
    alg = algebra_from_name(name)
    rng = np.random.default_rng(seed)
    # a random subspace inside a Cartan, so that centralizers are nontrivial
    s = alg.cartan @ rng.standard_normal((alg.cartan.shape[1], m)) if m else np.zeros((alg.dim, 0))
    if m > 1:
        s = np.hstack([s, rng.standard_normal((alg.dim, 1))])
    sub = Subspace(s, alg)
    cent = centralizer(alg, sub, tol=1e-8)
    for ci in cent.basis.T:
        for sj in sub.basis.T:
            bound = 10 * 1e-8 * alg.norm(ci) * alg.norm(sj) * max(1.0, np.abs(alg.bracket).max())
            assert alg.norm(alg.br(ci, sj)) <= bound


@given(seed=st.integers(0, 2**32 - 1))
def test_theta_invariant_subalgebra_as_algebra(seed):
    alg = algebra_from_name("sl3R")
    rng = np.random.default_rng(seed)
    # the Levi factor s(gl2 x gl1): H1, H2, E01, E10, moved by a random element of K
    levi = np.eye(8)[:, [0, 1, 2, 5]]
    x = alg.k_basis() @ rng.standard_normal(3)
    g = expm(adjoint(alg, x))
    res = Subspace(g @ levi, alg).as_algebra()
    assert res.dim == 4
    assert validate_algebra(res, 1e-8).ok
    assert np.linalg.matrix_rank(killing_form(res.bracket), tol=1e-8) == 3


def test_non_invariant_subspace_is_rejected(sl3):
    with pytest.raises(ValidationError, match="theta"):
        Subspace(np.eye(8)[:, :5], sl3).as_algebra()
