"""
tests/test_flat_families.py — Levi-Civita families cross-checked against the Schouten bracket.
"""

import pytest  # type: ignore

from config import RANDOM_SEED, TWO_DIM_CORPUS_SIZE  # type: ignore
from app.services.exact_algebra import AlgebraError, VariableSpace, embed  # type: ignore
from app.services.expression_parser import parse_expression  # type: ignore
from app.services.gallery import load_gallery_model  # type: ignore
from app.services.flat_families import (  # type: ignore
    bivector_from_one_form,
    flat_casimir_residual_3d,
    flat_casimir_residual_4d,
    flat_conditions_3d,
    four_dimensional_model,
    one_form_from_bivector,
    r2s1_casimir_conditions,
    r2s1_model,
    three_dimensional_model,
    two_dimensional_casimir_residual,
    two_form_from_bivector,
)
from app.services.poisson_geometry import (  # type: ignore
    casimir_components,
    compatibility_components,
    jacobiator,
    model_structure_check,
    verify_casimir,
)
from app.services.random_models import make_rng, random_polynomial, random_two_dimensional_models  # type: ignore


def _random_one_form(space, rng):
    return [random_polynomial(space, rng, max_degree=2, terms=3) for _ in range(3)]


def _random_two_form(space, rng):
    rows = [[space.zero() for _ in range(4)] for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            value = random_polynomial(space, rng, max_degree=2, terms=2)
            rows[i][j], rows[j][i] = value, -value
    return tuple(tuple(row) for row in rows)


@pytest.fixture
def space4():
    return VariableSpace(("x1", "x2", "x3", "x4"))


@pytest.fixture
def r2s1_space():
    return VariableSpace(("x1", "x2", "phi"))


# ---------------------------------------------------------------------------
# Three dimensions
# ---------------------------------------------------------------------------

class TestThreeDimensional:
    def test_broken_jacobi_from_one_form(self, space3, broken_jacobi):
        mu = [parse_expression(t, space3) for t in ("x1", "x1 + x2", "x3")]
        model = three_dimensional_model(space3, mu, [space3.zero()] * 3)
        assert model.varpi == broken_jacobi.model.varpi
        assert flat_conditions_3d(space3, mu, [space3.zero()] * 3)[0] == parse_expression("x3", space3)

    @pytest.mark.parametrize("seed", range(5))
    def test_conditions_match_schouten(self, space3, seed):
        rng = make_rng(RANDOM_SEED + seed)
        mu, nu = _random_one_form(space3, rng), _random_one_form(space3, rng)
        model = three_dimensional_model(space3, mu, nu)
        first, mixed, last = flat_conditions_3d(space3, mu, nu)
        key = ("x1", "x2", "x3")
        assert jacobiator(model.varpi, space3)[key] == -first
        assert jacobiator(model.theta, space3)[key] == -last
        assert compatibility_components(model.varpi, model.theta, space3)[key] == -mixed

    @pytest.mark.parametrize("seed", range(5))
    def test_casimir_residual_sign(self, space3, seed):
        rng = make_rng(RANDOM_SEED + 100 + seed)
        mu, nu = _random_one_form(space3, rng), _random_one_form(space3, rng)
        f = random_polynomial(space3, rng, max_degree=3)
        model = three_dimensional_model(space3, mu, nu)
        expected = [-c for c in casimir_components(model, f, "pi")]
        assert flat_casimir_residual_3d(space3, mu, nu, f) == expected

    def test_one_form_dual_inverts(self, space3):
        rng = make_rng(RANDOM_SEED)
        alpha = _random_one_form(space3, rng)
        assert one_form_from_bivector(space3, bivector_from_one_form(space3, alpha)) == alpha

    def test_wrong_dimension_rejected(self, space4):
        with pytest.raises(AlgebraError):
            flat_conditions_3d(space4, [space4.zero()] * 3, [space4.zero()] * 3)


# ---------------------------------------------------------------------------
# Four dimensions
# ---------------------------------------------------------------------------

class TestFourDimensional:
    @pytest.mark.parametrize("seed", range(3))
    def test_casimir_residual_is_twice_pi_df(self, space4, seed):
        rng = make_rng(RANDOM_SEED + 200 + seed)
        mu, nu = _random_two_form(space4, rng), _random_two_form(space4, rng)
        f = random_polynomial(space4, rng, max_degree=3)
        model = four_dimensional_model(space4, mu, nu)
        expected = [c * 2 for c in casimir_components(model, f, "pi")]
        assert flat_casimir_residual_4d(space4, mu, nu, f) == expected

    def test_two_form_dual_inverts(self, space4):
        mu = _random_two_form(space4, make_rng(RANDOM_SEED))
        model = four_dimensional_model(space4, mu, mu)
        assert two_form_from_bivector(space4, model.varpi) == mu

    def test_non_antisymmetric_two_form_rejected(self, space4):
        one, zero = space4.constant(1), space4.zero()
        rows = tuple(tuple(one if (i, j) == (0, 1) else zero for j in range(4)) for i in range(4))
        with pytest.raises(AlgebraError):
            four_dimensional_model(space4, rows, rows)


# ---------------------------------------------------------------------------
# R^2 x S^1
# ---------------------------------------------------------------------------

class TestR2S1:
    def test_gallery_model_matches_builder(self, r2s1_space):
        p, q = parse_expression("x1", r2s1_space), parse_expression("x2", r2s1_space)
        gallery = load_gallery_model("r2s1").model
        built = r2s1_model(r2s1_space, p, q)
        assert built.varpi == gallery.varpi and built.theta == gallery.theta

    @pytest.mark.parametrize("seed", range(5))
    def test_structure_always_passes(self, r2s1_space, seed):
        rng = make_rng(RANDOM_SEED + 300 + seed)
        plane = VariableSpace(("x1", "x2"))
        p = embed(random_polynomial(plane, rng, max_degree=3), r2s1_space.ring)
        q = embed(random_polynomial(plane, rng, max_degree=3), r2s1_space.ring)
        assert all(r.passed for r in model_structure_check(r2s1_model(r2s1_space, p, q)))

    @pytest.mark.parametrize("expr, is_casimir", [
        ("x1^2 + x2^2", True),
        ("x1", False),
        ("phi", False),
        ("(x1^2 + x2^2)^2 + 3", True),
    ])
    def test_casimir_conditions_agree_with_bracket(self, r2s1_space, expr, is_casimir):
        p, q = parse_expression("x1", r2s1_space), parse_expression("x2", r2s1_space)
        f = parse_expression(expr, r2s1_space)
        conditions = r2s1_casimir_conditions(r2s1_space, p, q, f)
        report = verify_casimir(r2s1_model(r2s1_space, p, q), f, "pi")
        assert report.passed == is_casimir
        assert report.passed == (not any(conditions))

    def test_p_may_not_depend_on_phi(self, r2s1_space):
        with pytest.raises(AlgebraError):
            r2s1_model(r2s1_space, parse_expression("phi", r2s1_space), r2s1_space.zero())


# ---------------------------------------------------------------------------
# Two dimensions
# ---------------------------------------------------------------------------

class TestTwoDimensionalCorpus:
    def test_every_model_is_poisson_and_compatible(self):
        for model in random_two_dimensional_models(TWO_DIM_CORPUS_SIZE):
            reports = model_structure_check(model)
            assert all(r.passed for r in reports), f"{model.title} failed"

    def test_casimir_residual_agrees_with_bracket(self):
        rng = make_rng(RANDOM_SEED + 400)
        for model in random_two_dimensional_models(TWO_DIM_CORPUS_SIZE, seed=RANDOM_SEED + 1):
            space = model.space
            mu, nu = model.varpi[0][1], model.theta[0][1]
            f = random_polynomial(space, rng, max_degree=2, terms=2)
            residual = two_dimensional_casimir_residual(space, mu, nu, f)
            assert verify_casimir(model, f, "pi").passed == (not any(residual)), model.title
