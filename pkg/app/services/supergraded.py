"""
app/services/supergraded.py — Free graded-commutative algebra and graded derivations.

A GeneratorTable declares named generators with non-negative degrees. Even
generators (coordinates x^i and degree-2 generators such as Ỹ_i, Γ^a) are
symbols of one commutative sympy PolyRing, which also carries the model's
scalar parameters. Odd generators (X̃^i, y_i, γ^a, ...) are tracked as sorted
position tuples in table order, so a SuperPolynomial is a map

    sorted odd positions  ->  nonzero PolyElement over the even symbols

and every product is normalized on construction with its exchange sign
absorbed into the coefficient.

A Derivation is a degree plus its value on every generator; apply_derivation
extends it by the graded Leibniz rule D(ab) = (Da)b + (-1)^{|D||a|} a(Db).
Two derivations agree iff they agree on every generator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from sympy.polys.domains import QQ  # type: ignore
from sympy.polys.rings import PolyElement, PolyRing  # type: ignore

from config import GENERATOR_DEGREES, GENERATOR_NAME_TEMPLATES  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    VariableSpace,
    embed,
    polynomial_ring,
    print_polynomial,
    to_rational,
)

logger = logging.getLogger(__name__)


# ==============================================================================
# Generator Table
# ==============================================================================

@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    role: str = ""     # x, Xt, y, Yt, gamma, Gamma, Xf, Yf, Xs, Ys
    index: str = ""    # coordinate name or Lie algebra basis name

    @property
    def parity(self) -> int:
        return self.degree % 2


class GeneratorTable:
    """
    Ordered generator declarations over a VariableSpace.

    Every coordinate of the space must appear as a degree-0 generator.
    The table order fixes the canonical order of odd factors.
    """

    def __init__(self, space: VariableSpace, generators: Sequence[Generator]):
        self.space = space
        self.generators: tuple[Generator, ...] = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError(f"Generator names are not unique: {names}")
        clashes = set(names) & set(space.parameters)
        if clashes:
            raise AlgebraError(f"Generator names collide with parameters: {sorted(clashes)}")
        for g in self.generators:
            if g.degree < 0:
                raise AlgebraError(f"Generator '{g.name}' has negative degree")
            if g.degree == 0 and g.name not in space.coordinates:
                raise AlgebraError(f"Degree-0 generator '{g.name}' is not a coordinate")
        missing = [c for c in space.coordinates if c not in names]
        if missing:
            raise AlgebraError(f"Coordinates without a generator entry: {missing}")

        self._by_name = {g.name: g for g in self.generators}
        self.odd: tuple[Generator, ...] = tuple(g for g in self.generators if g.parity == 1)
        self._odd_position = {g.name: i for i, g in enumerate(self.odd)}

        higher_even = tuple(g.name for g in self.generators if g.parity == 0 and g.degree > 0)
        self.ring: PolyRing = polynomial_ring(space.coordinates + space.parameters + higher_even)
        self._ring_names = tuple(str(s) for s in self.ring.symbols)
        # ring position -> generator degree (None for parameters)
        self._even_degree: list[Optional[int]] = []
        for symbol_name in self._ring_names:
            g = self._by_name.get(symbol_name)
            self._even_degree.append(g.degree if g is not None else None)

    # --- lookups ------------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise AlgebraError(f"Unknown generator '{name}'") from None

    def __iter__(self):
        return iter(self.generators)

    def names(self, role: Optional[str] = None) -> list[str]:
        return [g.name for g in self.generators if role is None or g.role == role]

    def name_for(self, role: str, index: str) -> str:
        key = "t" if role in ("gamma", "Gamma") else "c"
        return GENERATOR_NAME_TEMPLATES[role].format(**{key: index})

    def odd_position(self, name: str) -> int:
        return self._odd_position[name]

    def ring_position(self, name: str) -> int:
        return self._ring_names.index(name)

    # --- element constructors -------------------------------------------------

    def zero(self) -> "SuperPolynomial":
        return SuperPolynomial(self, {})

    def one(self) -> "SuperPolynomial":
        return self.scalar(1)

    def scalar(self, value) -> "SuperPolynomial":
        coeff = self.ring(to_rational(value)) if not isinstance(value, PolyElement) else value
        return SuperPolynomial(self, {(): coeff})

    def lift(self, p: PolyElement) -> "SuperPolynomial":
        """Embed a commutative polynomial (model ring) as a degree-0 element."""
        return SuperPolynomial(self, {(): embed(p, self.ring)})

    def generator(self, name: str) -> "SuperPolynomial":
        g = self[name]
        if g.parity == 1:
            return SuperPolynomial(self, {(self._odd_position[name],): self.ring.one})
        return SuperPolynomial(self, {(): self.ring.gens[self.ring_position(name)]})

    def role(self, role: str, index: str) -> "SuperPolynomial":
        return self.generator(self.name_for(role, index))

    # --- construction helper --------------------------------------------------

    @classmethod
    def standard(
        cls,
        space: VariableSpace,
        basis: Sequence[str] = (),
        roles: Sequence[str] = ("x", "Xt", "y", "Yt", "gamma", "Gamma"),
    ) -> "GeneratorTable":
        """
        Build a table from role names using the configured name templates.

        Coordinate roles expand over the coordinates, Weil roles over the basis.
        """
        generators: list[Generator] = []
        for role in roles:
            indices = basis if role in ("gamma", "Gamma") else space.coordinates
            for index in indices:
                key = "t" if role in ("gamma", "Gamma") else "c"
                name = GENERATOR_NAME_TEMPLATES[role].format(**{key: index})
                generators.append(Generator(name, GENERATOR_DEGREES[role], role, index))
        return cls(space, generators)


# ==============================================================================
# SuperPolynomial
# ==============================================================================

def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """Sign of sorting left+right; 0 if they share a factor."""
    inversions = 0
    left_set = set(left)
    for r in right:
        if r in left_set:
            return 0
        inversions += sum(1 for l in left if l > r)
    return -1 if inversions % 2 else 1


class SuperPolynomial:
    """Immutable normal-form element of the algebra over one GeneratorTable."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[tuple[int, ...], PolyElement]):
        self.table = table
        self.terms: dict[tuple[int, ...], PolyElement] = {k: v for k, v in terms.items() if v}

    # --- arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "SuperPolynomial":
        if isinstance(other, SuperPolynomial):
            if other.table is not self.table:
                raise AlgebraError("Operands belong to different generator tables")
            return other
        if isinstance(other, PolyElement):
            return self.table.lift(other)
        return self.table.scalar(other)

    def __add__(self, other) -> "SuperPolynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return SuperPolynomial(self.table, terms)

    __radd__ = __add__

    def __neg__(self) -> "SuperPolynomial":
        return SuperPolynomial(self.table, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "SuperPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SuperPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "SuperPolynomial":
        other = self._coerce(other)
        terms: dict[tuple[int, ...], PolyElement] = {}
        for left_key, left_coeff in self.terms.items():
            for right_key, right_coeff in other.terms.items():
                sign = _merge_sign(left_key, right_key)
                if sign == 0:
                    continue
                key = tuple(sorted(left_key + right_key))
                value = left_coeff * right_coeff
                if sign < 0:
                    value = -value
                terms[key] = terms[key] + value if key in terms else value
        return SuperPolynomial(self.table, terms)

    def __rmul__(self, other) -> "SuperPolynomial":
        # scalars and commutative polynomials are even and central
        return self._coerce(other) * self

    def __pow__(self, exponent: int) -> "SuperPolynomial":
        if exponent < 0:
            raise AlgebraError("Negative power of a superpolynomial")
        result = self.table.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperPolynomial):
            return other.table is self.table and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except (AlgebraError, TypeError, ValueError):
            return False

    __hash__ = None  # type: ignore

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"SuperPolynomial({format_superpolynomial(self)})"

    # --- grading ---------------------------------------------------------------

    def _term_degrees(self, key: tuple[int, ...], coeff: PolyElement) -> set[int]:
        odd_degree = sum(self.table.odd[k].degree for k in key)
        degrees = set()
        for monom in coeff.monoms():
            even_degree = sum(
                exponent * (self.table._even_degree[i] or 0)
                for i, exponent in enumerate(monom)
                if exponent
            )
            degrees.add(odd_degree + even_degree)
        return degrees

    def degrees(self) -> set[int]:
        result: set[int] = set()
        for key, coeff in self.terms.items():
            result |= self._term_degrees(key, coeff)
        return result

    def degree(self) -> Optional[int]:
        """Total degree of a homogeneous element; None for zero."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise AlgebraError(f"Element is not homogeneous (degrees {sorted(degrees)})")
        return degrees.pop()

    def homogeneous_components(self) -> dict[int, "SuperPolynomial"]:
        parts: dict[int, dict[tuple[int, ...], PolyElement]] = {}
        for key, coeff in self.terms.items():
            for monom, c in coeff.terms():
                piece = self.table.ring.from_dict({monom: c})
                (degree,) = self._term_degrees(key, piece)
                bucket = parts.setdefault(degree, {})
                bucket[key] = bucket[key] + piece if key in bucket else piece
        return {d: SuperPolynomial(self.table, t) for d, t in sorted(parts.items())}

    def generator_names(self) -> set[str]:
        """Generators that actually occur in the element."""
        names = {self.table.odd[k].name for key in self.terms for k in key}
        for coeff in self.terms.values():
            for monom in coeff.monoms():
                for i, exponent in enumerate(monom):
                    if exponent and self.table._even_degree[i] is not None:
                        names.add(self.table._ring_names[i])
        return names

    def coefficient(self, odd_names: Sequence[str]) -> PolyElement:
        """Coefficient of the given product of odd generators, in the given order."""
        positions = [self.table.odd_position(n) for n in odd_names]
        key = tuple(sorted(positions))
        if len(set(positions)) != len(positions):
            return self.table.ring.zero
        sign = 1
        for i in range(len(positions)):
            for j in range(i + 1, len(positions)):
                if positions[i] > positions[j]:
                    sign = -sign
        value = self.terms.get(key, self.table.ring.zero)
        return value if sign > 0 else -value

    # --- derivatives ----------------------------------------------------------

    def even_derivative(self, name: str) -> "SuperPolynomial":
        """∂/∂e for an even generator or coordinate e (even, so no signs)."""
        g = self.table[name]
        if g.parity != 0:
            raise AlgebraError(f"'{name}' is odd; use a left or right derivative")
        gen = self.table.ring.gens[self.table.ring_position(name)]
        return SuperPolynomial(self.table, {k: v.diff(gen) for k, v in self.terms.items()})

    def _odd_derivative(self, name: str, from_left: bool) -> "SuperPolynomial":
        g = self.table[name]
        if g.parity != 1:
            raise AlgebraError(f"'{name}' is even; use even_derivative")
        position = self.table.odd_position(name)
        terms: dict[tuple[int, ...], PolyElement] = {}
        for key, coeff in self.terms.items():
            if position not in key:
                continue
            r = key.index(position)
            moves = r if from_left else len(key) - 1 - r
            reduced = key[:r] + key[r + 1:]
            value = -coeff if moves % 2 else coeff
            terms[reduced] = terms[reduced] + value if reduced in terms else value
        return SuperPolynomial(self.table, terms)

    def left_derivative(self, name: str) -> "SuperPolynomial":
        return self._odd_derivative(name, from_left=True)

    def right_derivative(self, name: str) -> "SuperPolynomial":
        return self._odd_derivative(name, from_left=False)


def graded_product(a: SuperPolynomial, b: SuperPolynomial) -> SuperPolynomial:
    if a.table is not b.table:
        raise AlgebraError("Operands belong to different generator tables")
    return a * b


def _odd_monomial(table: GeneratorTable, key: tuple[int, ...]) -> SuperPolynomial:
    return SuperPolynomial(table, {key: table.ring.one})


def format_superpolynomial(a: SuperPolynomial) -> str:
    """Print in the input grammar with generator names; deterministic ordering."""
    if not a.terms:
        return "0"
    pieces: list[str] = []
    for key in sorted(a.terms, key=lambda k: (len(k), k)):
        coeff = a.terms[key]
        odd_names = [a.table.odd[k].name for k in key]
        coeff_text = print_polynomial(coeff)
        negative = False
        if not odd_names:
            body = coeff_text
        elif len(coeff) == 1:
            ((monom, c),) = coeff.terms()
            negative = c < 0
            magnitude = -coeff if negative else coeff
            magnitude_text = print_polynomial(magnitude)
            prefix = "" if magnitude_text == "1" else f"{magnitude_text}*"
            body = prefix + "*".join(odd_names)
        else:
            body = f"({coeff_text})*" + "*".join(odd_names)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        elif body.startswith("-") and not negative:
            pieces.append(f" - {body[1:]}" if not odd_names else f" + {body}")
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


# ==============================================================================
# Derivations
# ==============================================================================

@dataclass(frozen=True)
class Derivation:
    """Graded derivation: a degree and its value on every generator."""

    table: GeneratorTable
    degree: int
    action: Mapping[str, SuperPolynomial]
    label: str = "D"

    def __post_init__(self):
        for name, value in self.action.items():
            g = self.table[name]
            if value.table is not self.table:
                raise AlgebraError(f"{self.label}({name}) lives in a different table")
            if value:
                degree = value.degree()
                if degree != g.degree + self.degree:
                    raise AlgebraError(
                        f"{self.label}({name}) has degree {degree}, "
                        f"expected {g.degree + self.degree}"
                    )

    @property
    def parity(self) -> int:
        return self.degree % 2

    @classmethod
    def from_rules(
        cls,
        table: GeneratorTable,
        degree: int,
        rules: Mapping[str, SuperPolynomial],
        label: str,
    ) -> "Derivation":
        """Complete a partial rule set with zeros on the remaining generators."""
        action = {g.name: rules.get(g.name, table.zero()) for g in table}
        unknown = set(rules) - set(action)
        if unknown:
            raise AlgebraError(f"Rules for unknown generators: {sorted(unknown)}")
        return cls(table, degree, action, label)

    def on(self, name: str) -> SuperPolynomial:
        try:
            return self.action[name]
        except KeyError:
            raise AlgebraError(f"{self.label} has no action on generator '{name}'") from None

    def __call__(self, a: SuperPolynomial) -> SuperPolynomial:
        return apply_derivation(self, a)


def apply_derivation(D: Derivation, a: SuperPolynomial) -> SuperPolynomial:
    """Extend D from generators to a by the graded Leibniz rule."""
    table = D.table
    if a.table is not table:
        raise AlgebraError(f"{D.label} and its argument use different generator tables")
    result = table.zero()
    even_positions = [i for i, deg in enumerate(table._even_degree) if deg is not None]
    for key, coeff in a.terms.items():
        odd_part = _odd_monomial(table, key)
        # even factors: D(c) = sum_e (∂c/∂e) D(e)
        for i in even_positions:
            gen = table.ring.gens[i]
            dc = coeff.diff(gen)
            if not dc:
                continue
            image = D.on(table._ring_names[i])
            if image:
                result = result + SuperPolynomial(table, {(): dc}) * image * odd_part
        # odd factors, sign (-1)^{|D| r} for r odd factors passed
        for r, position in enumerate(key):
            image = D.on(table.odd[position].name)
            if not image:
                continue
            sign = -1 if (D.parity and r % 2) else 1
            left = _odd_monomial(table, key[:r])
            right = _odd_monomial(table, key[r + 1:])
            term = SuperPolynomial(table, {(): coeff}) * left * image * right
            result = result + (term if sign > 0 else -term)
    return result


def derivation_commutator(D1: Derivation, D2: Derivation, label: Optional[str] = None) -> Derivation:
    """[D1,D2] = D1 D2 − (−1)^{|D1||D2|} D2 D1, evaluated on generators."""
    if D1.table is not D2.table:
        raise AlgebraError("Derivations use different generator tables")
    sign = -1 if (D1.parity and D2.parity) else 1
    action = {}
    for g in D1.table:
        forward = apply_derivation(D1, D2.on(g.name))
        backward = apply_derivation(D2, D1.on(g.name))
        action[g.name] = forward + backward if sign < 0 else forward - backward
    return Derivation(D1.table, D1.degree + D2.degree, action, label or f"[{D1.label},{D2.label}]")


def derivation_linear_combination(
    table: GeneratorTable,
    degree: int,
    pairs: Iterable[tuple[object, Derivation]],
    label: str,
) -> Derivation:
    """Σ c_k D_k for derivations of one common degree."""
    action = {g.name: table.zero() for g in table}
    for coeff, D in pairs:
        if D.table is not table or D.degree != degree:
            raise AlgebraError(f"Cannot combine {D.label} into a degree {degree} derivation")
        if not coeff:
            continue
        for name in action:
            action[name] = action[name] + D.on(name) * coeff
    return Derivation(table, degree, action, label)


def zero_derivation(table: GeneratorTable, degree: int, label: str = "0") -> Derivation:
    return Derivation(table, degree, {g.name: table.zero() for g in table}, label)


def compare_derivations(D1: Derivation, D2: Derivation) -> list[tuple[str, SuperPolynomial]]:
    """Generators on which D1 and D2 differ, with the residual D1(g) − D2(g)."""
    if D1.table is not D2.table:
        raise AlgebraError("Derivations use different generator tables")
    residuals = []
    for g in D1.table:
        residual = D1.on(g.name) - D2.on(g.name)
        if residual:
            residuals.append((g.name, residual))
    return residuals


def substitute_generators(
    a: SuperPolynomial, subst: Mapping[str, SuperPolynomial]
) -> SuperPolynomial:
    """
    Algebra homomorphism sending each listed generator to its image.

    Unlisted generators and parameters are left alone; images must keep the
    generator's degree.
    """
    table = a.table
    for name, image in subst.items():
        g = table[name]
        if image.table is not table:
            raise AlgebraError(f"Image of '{name}' lives in a different table")
        if image and image.degree() != g.degree:
            raise AlgebraError(
                f"Substitution for '{name}' has degree {image.degree()}, expected {g.degree}"
            )
    if not subst:
        return a

    ring_subst = {
        i: subst[name]
        for i, name in enumerate(table._ring_names)
        if name in subst
    }
    result = table.zero()
    for key, coeff in a.terms.items():
        odd_part = table.one()
        for position in key:
            name = table.odd[position].name
            odd_part = odd_part * (subst[name] if name in subst else table.generator(name))
        for monom, c in coeff.terms():
            kept = [0] * len(monom)
            factor = table.one()
            for i, exponent in enumerate(monom):
                if not exponent:
                    continue
                if i in ring_subst:
                    factor = factor * (ring_subst[i] ** exponent)
                else:
                    kept[i] = exponent
            kept_poly = table.ring.from_dict({tuple(kept): c})
            result = result + SuperPolynomial(table, {(): kept_poly}) * factor * odd_part
    return result
