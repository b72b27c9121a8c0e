"""
app/services/exact_algebra.py — Exact rational multivariate polynomials.

Polynomials are sympy sparse ring elements (PolyElement) over QQ, so every
coefficient is an exact reduced rational and every exponent vector is dense
over the ring's variables. A VariableSpace fixes which names are chart
coordinates and which are scalar parameters: parameters are ordinary
commuting variables, but no derivative operator exists for them, so an
identity that holds in the ring holds for every parameter value at once.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from sympy import Rational, Symbol  # type: ignore
from sympy.polys.domains import QQ  # type: ignore
from sympy.polys.orderings import grlex, lex  # type: ignore
from sympy.polys.rings import PolyElement, PolyRing  # type: ignore

logger = logging.getLogger(__name__)

Polynomial = PolyElement
RationalLike = Union[int, str, Fraction, Rational]

IDENTIFIER_PATTERN = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
COORDINATE = "coordinate"
PARAMETER = "parameter"


class AlgebraError(ValueError):
    """Raised for table mismatches, degree mismatches and illegal derivatives."""


# ==============================================================================
# Rings & Variable Spaces
# ==============================================================================

@lru_cache(maxsize=None)
def polynomial_ring(names: tuple[str, ...]) -> PolyRing:
    """QQ[names] with lexicographic term order. Cached per name tuple."""
    return PolyRing(tuple(Symbol(name) for name in names), QQ, lex)


@dataclass(frozen=True)
class VariableSpace:
    """Ordered coordinates followed by ordered parameters."""

    coordinates: tuple[str, ...]
    parameters: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.coordinates + self.parameters
        if len(set(names)) != len(names):
            raise AlgebraError(f"Duplicate variable names in {names}")
        for name in names:
            if not IDENTIFIER_PATTERN.match(name):
                raise AlgebraError(f"'{name}' is not a valid identifier")

    @property
    def names(self) -> tuple[str, ...]:
        return self.coordinates + self.parameters

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.names)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def kind(self, name: str) -> str:
        if name in self.coordinates:
            return COORDINATE
        if name in self.parameters:
            return PARAMETER
        raise AlgebraError(f"Unknown variable '{name}'")

    def gen(self, name: str) -> Polynomial:
        self.kind(name)
        return self.ring.gens[self.names.index(name)]

    def zero(self) -> Polynomial:
        return self.ring.zero

    def constant(self, value: RationalLike) -> Polynomial:
        return self.ring(to_rational(value))


# ==============================================================================
# Rational Conversion
# ==============================================================================

def to_rational(value: RationalLike):
    """Convert int, 'p/q' text, Fraction or sympy Rational into a QQ element."""
    if isinstance(value, str):
        text = value.strip()
        match = re.fullmatch(r"(-?)(\d+)(?:/(\d+))?", text)
        if not match:
            raise AlgebraError(f"'{value}' is not a rational literal")
        sign, num, den = match.groups()
        den_value = int(den) if den else 1
        if den_value == 0:
            raise AlgebraError(f"Zero denominator in '{value}'")
        result = QQ(int(num), den_value)
        return -result if sign else result
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.p), int(value.q))
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def to_sympy_rational(value) -> Rational:
    return Rational(int(QQ.numer(value)), int(QQ.denom(value)))


def format_rational(value) -> str:
    num, den = int(QQ.numer(value)), int(QQ.denom(value))
    return str(num) if den == 1 else f"{num}/{den}"


# ==============================================================================
# Core Operations
# ==============================================================================

def embed(p: Polynomial, target: PolyRing) -> Polynomial:
    """Move p into a ring whose symbols include all of p's symbols, by name."""
    if p.ring == target:
        return p
    source_symbols = p.ring.symbols
    positions = []
    for symbol in source_symbols:
        if symbol not in target.symbols:
            raise AlgebraError(f"Variable '{symbol}' is missing from the target ring")
        positions.append(target.symbols.index(symbol))
    terms = {}
    width = target.ngens
    for monom, coeff in p.terms():
        exponents = [0] * width
        for position, exponent in zip(positions, monom):
            exponents[position] = exponent
        terms[tuple(exponents)] = coeff
    return target.from_dict(terms) if terms else target.zero


def partial_derivative(p: Polynomial, coordinate: str, space: VariableSpace) -> Polynomial:
    """∂p/∂coordinate. Parameters have no derivative operator."""
    if space.kind(coordinate) != COORDINATE:
        raise AlgebraError(f"Cannot differentiate with respect to parameter '{coordinate}'")
    return embed(p, space.ring).diff(space.gen(coordinate))


def gradient(p: Polynomial, space: VariableSpace) -> list[Polynomial]:
    return [partial_derivative(p, c, space) for c in space.coordinates]


def evaluate_at(p: Polynomial, point: Mapping[str, RationalLike]) -> Rational:
    """Exact value of p at a full assignment of its ring's variables."""
    names = [str(symbol) for symbol in p.ring.symbols]
    missing = [name for name in names if name not in point]
    if missing:
        raise AlgebraError(f"Missing assignment for {', '.join(missing)}")
    values = [to_rational(point[name]) for name in names]
    total = QQ.zero
    for monom, coeff in p.terms():
        term = coeff
        for value, exponent in zip(values, monom):
            if exponent:
                term *= value ** exponent
        total += term
    return to_sympy_rational(total)


def substitute_parameters(
    p: Polynomial, values: Mapping[str, RationalLike], space: VariableSpace
) -> Polynomial:
    """Specialize some parameters to rational values, staying in the same ring."""
    p = embed(p, space.ring)
    for name, value in values.items():
        if space.kind(name) != PARAMETER:
            raise AlgebraError(f"'{name}' is not a parameter")
        p = p.subs(space.gen(name), to_rational(value))
    return p


def is_zero(p: Polynomial) -> bool:
    return not p


def total_degree(p: Polynomial) -> int:
    if not p:
        return -1
    return max(sum(monom) for monom in p.monoms())


def print_polynomial(p: Polynomial) -> str:
    """
    Print p in the input grammar, highest total degree first.

    The output always re-parses to the same normal form.
    """
    if not p:
        return "0"
    names = [str(symbol) for symbol in p.ring.symbols]
    pieces: list[str] = []
    for monom, coeff in p.terms(order=grlex):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        factors = [
            name if exponent == 1 else f"{name}^{exponent}"
            for name, exponent in zip(names, monom)
            if exponent
        ]
        if magnitude != 1 or not factors:
            factors.insert(0, format_rational(magnitude))
        body = "*".join(factors)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def polynomial_from_terms(
    space: VariableSpace, terms: Iterable[tuple[Sequence[int], RationalLike]]
) -> Polynomial:
    ring = space.ring
    result = ring.zero
    for exponents, coeff in terms:
        if len(exponents) != ring.ngens:
            raise AlgebraError(
                f"Exponent vector of length {len(exponents)} for {ring.ngens} variables"
            )
        result += ring.from_dict({tuple(exponents): to_rational(coeff)})
    return result
