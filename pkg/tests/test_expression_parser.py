"""
tests/test_expression_parser.py — Input grammar: accepted forms and located errors.
"""

import pytest  # type: ignore

from app.services.exact_algebra import print_polynomial  # type: ignore
from app.services.expression_parser import ExpressionError, parse_expression, parse_rational  # type: ignore


class TestAcceptedExpressions:
    def test_precedence_of_power_over_product(self, space3):
        assert parse_expression("2*x1^2", space3) == parse_expression("2*(x1*x1)", space3)

    def test_unary_minus_binds_after_power(self, space3):
        p = parse_expression("-x1^2", space3)
        assert print_polynomial(p) == "-x1^2", "-x^2 means -(x^2)"

    def test_unary_minus_inside_product(self, space3):
        assert parse_expression("2*-x1", space3) == parse_expression("-2*x1", space3)

    def test_rational_coefficients(self, space3):
        p = parse_expression("1/2*x1 + 3/4", space3)
        assert print_polynomial(p) == "1/2*x1 + 3/4"

    def test_parenthesised_power_expands(self, space3):
        p = parse_expression("(x1 - x2)^2", space3)
        assert p == parse_expression("x1^2 - 2*x1*x2 + x2^2", space3)

    def test_zero_exponent(self, space3):
        assert parse_expression("(x1 + x3)^0", space3) == 1

    def test_parameters_are_variables(self, parametric_space):
        p = parse_expression("a*x1 - a^2", parametric_space)
        assert print_polynomial(p) == "x1*a - a^2"

    def test_whitespace_is_ignored(self, space3):
        assert parse_expression("  x1 *x2+   1 ", space3) == parse_expression("x1*x2 + 1", space3)

    def test_plain_name_list_accepted(self):
        p = parse_expression("z1*z2", ("z1", "z2"))
        assert print_polynomial(p) == "z1*z2"


class TestRejectedExpressions:
    @pytest.mark.parametrize("text, position", [
        ("2x1", 1),             # implicit multiplication
        ("x1 x2", 3),
        ("x1 + x4", 5),         # unknown identifier
        ("x1^-1", 3),           # negative exponent
        ("x1^x2", 3),           # symbolic exponent
        ("x1^1/2", 3),          # fractional exponent
        ("0.5*x1", 0),          # decimal literal
        ("x1/x2", 2),           # division by a non-literal
        ("1/0", 2),             # zero denominator
        ("(x1 + x2", 8),        # unclosed parenthesis
        ("x1 + ", 5),           # dangling operator
        ("x1 $ 2", 3),          # stray character
    ])
    def test_error_position(self, space3, text, position):
        with pytest.raises(ExpressionError) as info:
            parse_expression(text, space3)
        assert info.value.position == position, f"{text!r}: {info.value}"

    def test_empty_expression(self, space3):
        with pytest.raises(ExpressionError):
            parse_expression("   ", space3)

    def test_error_carries_line_when_attached(self, space3):
        with pytest.raises(ExpressionError) as info:
            parse_expression("x1 +* x2", space3)
        located = info.value.at_line(7)
        assert located.line == 7
        assert "line 7" in str(located)

    def test_error_is_a_value_error(self, space3):
        with pytest.raises(ValueError):
            parse_expression("x9", space3)


class TestParseRational:
    @pytest.mark.parametrize("text, expected", [("-3/4", "-3/4"), ("5", "5"), ("  2/4 ", "1/2")])
    def test_signed_literals(self, text, expected):
        from app.services.exact_algebra import format_rational  # type: ignore
        assert format_rational(parse_rational(text)) == expected

    @pytest.mark.parametrize("text", ["x1", "1/2*3", "", "1.5"])
    def test_non_literals_rejected(self, text):
        with pytest.raises(ExpressionError):
            parse_rational(text)
