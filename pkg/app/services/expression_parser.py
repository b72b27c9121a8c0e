"""
app/services/expression_parser.py — Recursive descent parser for polynomial expressions.

Grammar (no implicit multiplication, exponents are non-negative integer literals):

    expr       := term { ("+" | "-") term }
    term       := factor { "*" factor }
    factor     := ["-"] base ["^" uint]
    base       := rational | identifier | "(" expr ")"
    rational   := uint ["/" uint]
    identifier := letter { letter | digit | "_" }

The parser builds the polynomial directly in the ring of the given variables,
so the returned value is already in normal form.
Both error types raised by the file readers built on it (ExpressionError and
ModelFileError) live here.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from sympy.polys.domains import QQ  # type: ignore

from app.services.exact_algebra import (  # type: ignore
    Polynomial,
    VariableSpace,
    polynomial_ring,
)

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()])|(?P<bad>\S))"
)


class ExpressionError(ValueError):
    """Syntax or name error at a 0-based character position of the input text."""

    def __init__(self, message: str, position: int, text: str = "", line: Optional[int] = None):
        self.message = message
        self.position = position
        self.text = text
        self.line = line
        where = f"line {line}, column {position + 1}" if line is not None else f"column {position + 1}"
        super().__init__(f"{message} at {where}")

    def at_line(self, line: int) -> "ExpressionError":
        return ExpressionError(self.message, self.position, self.text, line)


class ModelFileError(ValueError):
    """Bad model, chain or configuration file: structure, unknown names, dimension mismatch."""


@dataclass(frozen=True)
class _Token:
    kind: str       # number | name | op | end
    value: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    position = 0
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if match is None or match.end() == position:
            break
        kind = match.lastgroup
        value = match.group(kind) if kind else ""
        start = match.start(kind) if kind else match.end()
        position = match.end()
        if kind is None:
            break
        if kind == "bad":
            raise ExpressionError(f"Unexpected character '{value}'", start, text)
        tokens.append(_Token(kind, value, start))
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, space_names: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0
        self.names = tuple(space_names)
        self.ring = polynomial_ring(self.names)

    # --- token helpers -------------------------------------------------------

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _is_op(self, symbol: str) -> bool:
        return self.current.kind == "op" and self.current.value == symbol

    def _error(self, message: str, token: Optional[_Token] = None) -> ExpressionError:
        token = token or self.current
        return ExpressionError(message, token.position, self.text)

    # --- grammar -------------------------------------------------------------

    def parse(self) -> Polynomial:
        if self.current.kind == "end":
            raise self._error("Empty expression")
        value = self._expr()
        if self.current.kind != "end":
            raise self._error(f"Unexpected '{self.current.value}'")
        return value

    def _expr(self) -> Polynomial:
        value = self._term()
        while self._is_op("+") or self._is_op("-"):
            operator = self._advance().value
            right = self._term()
            value = value + right if operator == "+" else value - right
        return value

    def _term(self) -> Polynomial:
        value = self._factor()
        while self._is_op("*"):
            self._advance()
            value = value * self._factor()
        return value

    def _factor(self) -> Polynomial:
        negate = False
        if self._is_op("-"):
            self._advance()
            negate = True
        value = self._base()
        if self._is_op("^"):
            self._advance()
            value = value ** self._exponent()
        return -value if negate else value

    def _exponent(self) -> int:
        token = self.current
        if self._is_op("-"):
            raise self._error("Negative exponent")
        if token.kind != "number":
            raise self._error("Exponent must be a non-negative integer literal")
        if "." in token.value:
            raise self._error("Non-integer exponent", token)
        self._advance()
        if self._is_op("/"):
            raise self._error("Non-integer exponent", token)
        return int(token.value)

    def _base(self) -> Polynomial:
        token = self.current
        if token.kind == "number":
            return self._rational()
        if token.kind == "name":
            self._advance()
            if token.value not in self.names:
                raise self._error(f"Unknown identifier '{token.value}'", token)
            return self.ring.gens[self.names.index(token.value)]
        if self._is_op("("):
            self._advance()
            value = self._expr()
            if not self._is_op(")"):
                raise self._error("Expected ')'")
            self._advance()
            return value
        if token.kind == "end":
            raise self._error("Unexpected end of expression")
        raise self._error(f"Unexpected '{token.value}'")

    def _rational(self) -> Polynomial:
        token = self._advance()
        if "." in token.value:
            raise self._error("Decimal literals are not allowed; write a rational p/q", token)
        numerator = int(token.value)
        denominator = 1
        if self._is_op("/"):
            self._advance()
            den_token = self.current
            if den_token.kind != "number" or "." in den_token.value:
                raise self._error("Expected an integer denominator")
            self._advance()
            denominator = int(den_token.value)
            if denominator == 0:
                raise self._error("Zero denominator", den_token)
        return self.ring(QQ(numerator, denominator))


def parse_expression(text: str, variables: Union[VariableSpace, Sequence[str]]) -> Polynomial:
    """
    Parse text into a polynomial over the given variables.

    Raises ExpressionError with the offending character position.
    """
    names = variables.names if isinstance(variables, VariableSpace) else tuple(variables)
    return _Parser(text, names).parse()


def parse_rational(text: str) -> object:
    """Parse a signed rational literal such as '-3/4' into a QQ element."""
    stripped = text.strip()
    negative = stripped.startswith("-")
    body = stripped[1:] if negative else stripped
    parser = _Parser(body, ())
    if parser.current.kind != "number":
        raise ExpressionError("Expected a rational literal", 0, text)
    value = parser._rational()
    if parser.current.kind != "end":
        raise ExpressionError("Expected a rational literal", parser.current.position, text)
    coeff = value.LC if value else QQ.zero
    return -coeff if negative else coeff
