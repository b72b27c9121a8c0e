"""
tests/test_supergraded.py — Graded-commutative normal form, derivatives and derivations.
"""

import pytest  # type: ignore

from app.services.exact_algebra import AlgebraError, VariableSpace  # type: ignore
from app.services.random_models import make_rng, random_element  # type: ignore
from app.services.supergraded import (  # type: ignore
    Derivation,
    Generator,
    GeneratorTable,
    apply_derivation,
    compare_derivations,
    derivation_commutator,
    format_superpolynomial,
    substitute_generators,
    zero_derivation,
)


@pytest.fixture
def table(space3):
    return GeneratorTable.standard(space3, ("t1",))


@pytest.fixture
def de_rham(table):
    """d: x ↦ X̃, y ↦ Ỹ, γ ↦ Γ."""
    rules = {}
    for c in table.space.coordinates:
        rules[c] = table.role("Xt", c)
        rules[table.name_for("y", c)] = table.role("Yt", c)
    rules["gamma_t1"] = table.role("Gamma", "t1")
    return Derivation.from_rules(table, 1, rules, "d")


@pytest.fixture
def contraction(table):
    """Contraction with the first coordinate direction: X̃^1 ↦ 1."""
    return Derivation.from_rules(table, -1, {"X_x1": table.one()}, "i")


class TestGeneratorTable:
    def test_standard_names_and_degrees(self, table):
        assert table["X_x1"].degree == 1
        assert table["Y_x2"].degree == 2
        assert table["gamma_t1"].role == "gamma"
        assert table["Gamma_t1"].degree == 2

    def test_odd_generators_in_table_order(self, table):
        assert [g.name for g in table.odd][:4] == ["X_x1", "X_x2", "X_x3", "y_x1"]

    def test_parameter_clash_rejected(self):
        space = VariableSpace(("x1",), ("X_x1",))
        with pytest.raises(AlgebraError):
            GeneratorTable.standard(space)

    def test_every_coordinate_needs_a_generator(self, space3):
        with pytest.raises(AlgebraError):
            GeneratorTable(space3, [Generator("x1", 0, "x", "x1")])

    def test_unknown_generator_lookup(self, table):
        with pytest.raises(AlgebraError):
            table["Z_x1"]


class TestNormalForm:
    def test_odd_generators_anticommute(self, table):
        X, y = table.generator("X_x1"), table.generator("y_x1")
        assert X * y == -(y * X)
        assert y * y == 0, "An odd generator squares to zero"

    def test_even_generators_commute(self, table):
        Y, X = table.generator("Y_x1"), table.generator("X_x2")
        assert Y * X == X * Y

    def test_coordinates_are_central(self, table):
        x, y = table.generator("x1"), table.generator("y_x3")
        assert x * y == y * x

    def test_coefficient_in_given_order(self, table):
        a = table.generator("y_x1") * table.generator("y_x2")
        assert a.coefficient(["y_x1", "y_x2"]) == 1
        assert a.coefficient(["y_x2", "y_x1"]) == -1

    def test_scalar_comparison(self, table):
        assert table.scalar("1/2") * 2 == 1
        assert table.zero() == 0


class TestGrading:
    def test_total_degree(self, table):
        a = table.generator("x1") * table.generator("X_x1") * table.generator("y_x2")
        assert a.degree() == 2
        assert table.generator("Gamma_t1").degree() == 2
        assert table.zero().degree() is None

    def test_inhomogeneous_degree_raises(self, table):
        a = table.generator("X_x1") + table.generator("Y_x1")
        with pytest.raises(AlgebraError):
            a.degree()
        assert set(a.homogeneous_components()) == {1, 2}

    def test_generator_names_reports_even_and_odd(self, table):
        a = table.generator("x2") * table.generator("Y_x1") * table.generator("gamma_t1")
        assert a.generator_names() == {"x2", "Y_x1", "gamma_t1"}


class TestDerivatives:
    def test_left_and_right_odd_derivatives(self, table):
        a = table.generator("y_x1") * table.generator("y_x2")
        assert a.left_derivative("y_x1") == table.generator("y_x2")
        assert a.right_derivative("y_x1") == -table.generator("y_x2")
        assert a.left_derivative("y_x2") == -table.generator("y_x1")
        assert a.right_derivative("y_x2") == table.generator("y_x1")

    def test_even_derivative(self, table):
        a = table.generator("x1") ** 2 * table.generator("X_x3")
        assert a.even_derivative("x1") == table.generator("x1") * table.generator("X_x3") * 2

    def test_wrong_parity_raises(self, table):
        with pytest.raises(AlgebraError):
            table.generator("x1").left_derivative("x1")
        with pytest.raises(AlgebraError):
            table.generator("y_x1").even_derivative("y_x1")


class TestDerivations:
    def test_de_rham_on_product(self, table, de_rham):
        x1, x2 = table.generator("x1"), table.generator("x2")
        expected = table.generator("X_x1") * x2 + x1 * table.generator("X_x2")
        assert apply_derivation(de_rham, x1 * x2) == expected

    def test_de_rham_squares_to_zero(self, table, de_rham):
        square = derivation_commutator(de_rham, de_rham)
        assert square.degree == 2
        assert compare_derivations(square, zero_derivation(table, 2)) == []

    def test_degree_mismatch_rejected(self, table):
        with pytest.raises(AlgebraError):
            Derivation.from_rules(table, 1, {"x1": table.generator("Y_x1")}, "bad")

    def test_rules_for_unknown_generator_rejected(self, table):
        with pytest.raises(AlgebraError):
            Derivation.from_rules(table, 1, {"Z_x1": table.zero()}, "bad")

    def test_commutator_with_contraction(self, table, de_rham, contraction):
        """[i, d] is the Lie derivative along the first coordinate direction."""
        lie = derivation_commutator(contraction, de_rham)
        assert lie.degree == 0
        assert lie.on("x1") == 1
        assert lie.on("x2") == 0
        assert lie.on("X_x1") == 0

    @pytest.mark.parametrize("degree_a, degree_b", [(0, 1), (1, 1), (1, 2), (2, 2)])
    def test_graded_leibniz_rule(self, table, de_rham, contraction, degree_a, degree_b):
        rng = make_rng(7 + 3 * degree_a + degree_b)
        for _ in range(5):
            a = random_element(table, rng, degree_a)
            b = random_element(table, rng, degree_b)
            for D in (de_rham, contraction):
                sign = -1 if (D.degree * degree_a) % 2 else 1
                expected = apply_derivation(D, a) * b + a * apply_derivation(D, b) * sign
                assert apply_derivation(D, a * b) == expected, f"Leibniz fails for {D.label}"


class TestSubstitution:
    def test_homomorphism_on_products(self, table):
        X1, y1 = table.generator("X_x1"), table.generator("y_x1")
        shifted = substitute_generators(X1 * y1, {"X_x1": X1 + y1})
        assert shifted == X1 * y1, "y1*y1 vanishes after the shift"

    def test_even_generator_substitution(self, table):
        x1 = table.generator("x1")
        result = substitute_generators(x1 ** 2, {"x1": x1 + 1})
        assert result == x1 ** 2 + x1 * 2 + 1

    def test_degree_preserving_images_only(self, table):
        with pytest.raises(AlgebraError):
            substitute_generators(table.generator("X_x1"), {"X_x1": table.generator("Y_x1")})


class TestFormatting:
    def test_deterministic_order(self, table):
        a = table.generator("X_x1") * table.generator("y_x1") * 2 - table.generator("y_x2")
        assert format_superpolynomial(a) == "-y_x2 + 2*X_x1*y_x1"

    def test_polynomial_coefficient_parenthesised(self, table):
        a = (table.generator("x1") + 1) * table.generator("X_x2")
        assert format_superpolynomial(a) == "(x1 + 1)*X_x2"

    def test_zero(self, table):
        assert format_superpolynomial(table.zero()) == "0"
