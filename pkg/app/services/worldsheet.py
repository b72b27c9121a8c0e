"""
app/services/worldsheet.py — De Rham superfields, superchains and exact integration.

A superfield on the 2D chart (z1, z2) is the expansion

    Ψ = ψ0 + ζ^1 ψ1_1 + ζ^2 ψ1_2 + ζ^1 ζ^2 ψ2_12

with polynomial components. d = ζ^α ∂_α acts componentwise:
(dΨ)1_α = ∂_α ψ0 and (dΨ)2_12 = ∂_1 ψ1_2 − ∂_2 ψ1_1.

Sign ledger: components are commuting polynomials and ζ^1, ζ^2 anticommute,
so the product of two classical superfields is the wedge product of their
form parts, with ζ^1ζ^2 as the positive orientation. A configured field of
degree D may carry every form degree p; a component of odd ghost number D − p
is Grassmann-odd, so it is stored as θ·ψ with an odd constant θ of its own.
Terms are written θ^K ω with the θ's to the left of the ζ's, every component
then has total parity D mod 2, and realization is an algebra homomorphism
that commutes with d.

A superchain is an integer-weighted sum of affine simplices of dimension
0, 1 and 2 with rational vertices. Simplices are stored with sorted vertices
and the permutation sign moved into the weight, so opposite orientations
cancel on addition. Integration is exact: each monomial is pulled back to the
reference simplex and integrated in closed form.
integrate() returns the body; ghost_integrals() returns the coefficient of each
θ^K separately.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import factorial
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from sympy import Rational  # type: ignore
from sympy.polys.domains import QQ  # type: ignore

from config import WORLDSHEET_COORDINATES  # type: ignore
from app.schemas.models import CheckReport, Witness  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    Polynomial,
    RationalLike,
    VariableSpace,
    embed,
    format_rational,
    polynomial_ring,
    print_polynomial,
    to_rational,
    to_sympy_rational,
)
from app.services.expression_parser import ExpressionError, ModelFileError, parse_expression, parse_rational  # type: ignore
from app.services.cartan_bv import lagrangian_element  # type: ignore
from app.services.supergraded import SuperPolynomial  # type: ignore

logger = logging.getLogger(__name__)


class WorldsheetError(ValueError):
    """Raised for unassigned generators, non-cycle pairings and degree mismatches."""


@lru_cache(maxsize=1)
def worldsheet_space() -> VariableSpace:
    return VariableSpace(tuple(WORLDSHEET_COORDINATES))


def worldsheet_polynomial(value: Union[str, Polynomial, RationalLike]) -> Polynomial:
    """Parse or embed a component into QQ[z1, z2]."""
    space = worldsheet_space()
    if isinstance(value, str):
        return parse_expression(value, space)
    if hasattr(value, "ring"):
        return embed(value, space.ring)
    return space.constant(value)


# ==============================================================================
# Superfields
# ==============================================================================

GhostKey = tuple  # sorted names of odd ghost constants
COMPONENT_FORM_DEGREES = {"psi0": 0, "psi1_1": 1, "psi1_2": 1, "psi2_12": 2}


@dataclass(frozen=True)
class DeRhamSuperfield:
    """
    Body components plus ghost terms θ^K·Ψ_K.

    K is a sorted tuple of odd constant names and every Ψ_K is a plain
    component triple. A superfield without ghost terms is a classical form.
    """

    psi0: Polynomial
    psi1: tuple[Polynomial, Polynomial]
    psi2: Polynomial
    degree: int = 0
    ghosts: Mapping[GhostKey, "DeRhamSuperfield"] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        psi0: Union[str, Polynomial, RationalLike] = 0,
        psi1: Sequence[Union[str, Polynomial, RationalLike]] = (0, 0),
        psi2: Union[str, Polynomial, RationalLike] = 0,
        degree: int = 0,
    ) -> "DeRhamSuperfield":
        if len(psi1) != 2:
            raise WorldsheetError(f"psi1 needs 2 components, got {len(psi1)}")
        return cls(
            worldsheet_polynomial(psi0),
            (worldsheet_polynomial(psi1[0]), worldsheet_polynomial(psi1[1])),
            worldsheet_polynomial(psi2),
            degree,
        )

    @classmethod
    def zero(cls, degree: int = 0) -> "DeRhamSuperfield":
        return cls.build(degree=degree)

    @classmethod
    def constant(cls, value: RationalLike) -> "DeRhamSuperfield":
        return cls.build(psi0=value)

    @classmethod
    def from_terms(cls, terms: Mapping[GhostKey, "DeRhamSuperfield"], degree: int = 0) -> "DeRhamSuperfield":
        body = terms.get((), cls.zero())
        ghosts = {key: part.body.with_degree(0) for key, part in terms.items() if key and part.body}
        return cls(body.psi0, body.psi1, body.psi2, degree, dict(sorted(ghosts.items())))

    @property
    def body(self) -> "DeRhamSuperfield":
        return DeRhamSuperfield(self.psi0, self.psi1, self.psi2, self.degree)

    def with_degree(self, degree: int) -> "DeRhamSuperfield":
        return replace(self, degree=degree)

    def terms(self) -> list[tuple[GhostKey, "DeRhamSuperfield"]]:
        return [((), self.body), *self.ghosts.items()]

    def __add__(self, other: "DeRhamSuperfield") -> "DeRhamSuperfield":
        totals: dict[GhostKey, DeRhamSuperfield] = {}
        for key, part in self.terms() + other.terms():
            if key in totals:
                left = totals[key]
                part = DeRhamSuperfield(
                    left.psi0 + part.psi0,
                    (left.psi1[0] + part.psi1[0], left.psi1[1] + part.psi1[1]),
                    left.psi2 + part.psi2,
                )
            totals[key] = part
        return DeRhamSuperfield.from_terms(totals, self.degree)

    def scaled(self, factor) -> "DeRhamSuperfield":
        return DeRhamSuperfield.from_terms(
            {
                key: DeRhamSuperfield(
                    part.psi0 * factor,
                    (part.psi1[0] * factor, part.psi1[1] * factor),
                    part.psi2 * factor,
                )
                for key, part in self.terms()
            },
            self.degree,
        )

    def __neg__(self) -> "DeRhamSuperfield":
        return self.scaled(-1)

    def __sub__(self, other: "DeRhamSuperfield") -> "DeRhamSuperfield":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self.psi0 or self.psi1[0] or self.psi1[1] or self.psi2 or self.ghosts)

    def _nonzero_components(self) -> list[str]:
        values = dict(zip(COMPONENT_FORM_DEGREES, (self.psi0, self.psi1[0], self.psi1[1], self.psi2)))
        return [name for name, value in values.items() if value]

    def form_degrees(self) -> set[int]:
        return {
            COMPONENT_FORM_DEGREES[name]
            for _, part in self.terms()
            for name in part._nonzero_components()
        }

    def parities(self) -> set[int]:
        """Total parities, ghost count plus form degree, of the nonzero components."""
        return {
            (len(key) + COMPONENT_FORM_DEGREES[name]) % 2
            for key, part in self.terms()
            for name in part._nonzero_components()
        }

    def components(self) -> dict[str, str]:
        printed = {
            "psi0": print_polynomial(self.psi0),
            "psi1_1": print_polynomial(self.psi1[0]),
            "psi1_2": print_polynomial(self.psi1[1]),
            "psi2_12": print_polynomial(self.psi2),
        }
        for key, part in self.ghosts.items():
            body = part.components()
            for name in part._nonzero_components():
                printed[f"{'*'.join(key)}*{name}"] = body[name]
        return printed


def ghost_constant(field_name: str, component: str) -> str:
    """The odd constant carried by one ghost-odd component of a configured field."""
    return f"{field_name}:{component}"


def with_ghost_constants(field_name: str, psi: DeRhamSuperfield) -> DeRhamSuperfield:
    """
    Move every component whose ghost number (degree minus form degree) is odd
    onto its own odd constant, so the superfield has total parity degree mod 2.
    """
    if psi.ghosts:
        return psi
    zero = worldsheet_space().zero()
    body = {"psi0": psi.psi0, "psi1_1": psi.psi1[0], "psi1_2": psi.psi1[1], "psi2_12": psi.psi2}
    terms: dict[GhostKey, DeRhamSuperfield] = {}
    for name, form_degree in COMPONENT_FORM_DEGREES.items():
        if (psi.degree - form_degree) % 2 == 0 or not body[name]:
            continue
        single = {key: (body[name] if key == name else zero) for key in COMPONENT_FORM_DEGREES}
        terms[(ghost_constant(field_name, name),)] = DeRhamSuperfield(
            single["psi0"], (single["psi1_1"], single["psi1_2"]), single["psi2_12"]
        )
        body[name] = zero
    terms[()] = DeRhamSuperfield(body["psi0"], (body["psi1_1"], body["psi1_2"]), body["psi2_12"])
    return DeRhamSuperfield.from_terms(terms, psi.degree)


def _dz(p: Polynomial, index: int) -> Polynomial:
    space = worldsheet_space()
    return p.diff(space.gen(space.coordinates[index]))


def _plain_d(psi: DeRhamSuperfield) -> DeRhamSuperfield:
    return DeRhamSuperfield(
        worldsheet_space().zero(),
        (_dz(psi.psi0, 0), _dz(psi.psi0, 1)),
        _dz(psi.psi1[1], 0) - _dz(psi.psi1[0], 1),
    )


def superfield_d(psi: DeRhamSuperfield) -> DeRhamSuperfield:
    """dΨ: (∂_1ψ0, ∂_2ψ0) and ∂_1ψ1_2 − ∂_2ψ1_1; ζ^α passes θ^K with sign (−1)^|K|."""
    terms = {}
    for key, part in psi.terms():
        differential = _plain_d(part)
        terms[key] = -differential if len(key) % 2 else differential
    return DeRhamSuperfield.from_terms(terms, psi.degree + 1)


def _wedge(a: DeRhamSuperfield, b: DeRhamSuperfield) -> DeRhamSuperfield:
    return DeRhamSuperfield(
        a.psi0 * b.psi0,
        (a.psi1[0] * b.psi0 + a.psi0 * b.psi1[0], a.psi1[1] * b.psi0 + a.psi0 * b.psi1[1]),
        a.psi2 * b.psi0 + a.psi0 * b.psi2 + a.psi1[0] * b.psi1[1] - a.psi1[1] * b.psi1[0],
    )


def _odd_one_forms(a: DeRhamSuperfield) -> DeRhamSuperfield:
    return DeRhamSuperfield(a.psi0, (-a.psi1[0], -a.psi1[1]), a.psi2)


def superfield_product(a: DeRhamSuperfield, b: DeRhamSuperfield) -> DeRhamSuperfield:
    """
    Wedge product of the form parts; ζ^1ζ^2 = −ζ^2ζ^1.

    Ghost terms multiply as (θ^K ω)(θ^L η) = (−1)^{|ω||L|} θ^K θ^L ω∧η, and
    θ^K θ^L is reordered to sorted form with its permutation sign.
    """
    terms: dict[GhostKey, DeRhamSuperfield] = {}
    for k, left in a.terms():
        for l, right in b.terms():
            if set(k) & set(l):
                continue
            key, sign = _sort_with_sign(k + l)
            part = _wedge(_odd_one_forms(left) if len(l) % 2 else left, right)
            part = part if sign > 0 else -part
            terms[key] = terms[key] + part if key in terms else part
    return DeRhamSuperfield.from_terms(terms, a.degree + b.degree)


# ==============================================================================
# Superchains
# ==============================================================================

Vertex = tuple  # (QQ, QQ)
SIMPLEX_KINDS = {"point": 1, "segment": 2, "triangle": 3}


def _vertex(values: Sequence[RationalLike]) -> Vertex:
    if len(values) != 2:
        raise WorldsheetError(f"A vertex needs 2 coordinates, got {len(values)}")
    return tuple(to_rational(v) for v in values)


def _sort_with_sign(vertices: Sequence[Vertex]) -> tuple[tuple[Vertex, ...], int]:
    order = sorted(range(len(vertices)), key=lambda k: vertices[k])
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                sign = -sign
    return tuple(vertices[k] for k in order), sign


@dataclass(frozen=True)
class Superchain:
    """Σ n_σ σ over oriented affine simplices; zero weights are dropped."""

    terms: Mapping[tuple[Vertex, ...], int] = field(default_factory=dict)

    @classmethod
    def from_simplices(cls, simplices: Iterable[tuple[Sequence[Sequence[RationalLike]], int]]) -> "Superchain":
        totals: dict[tuple[Vertex, ...], int] = defaultdict(int)
        for vertices, weight in simplices:
            if not 1 <= len(vertices) <= 3:
                raise WorldsheetError(f"Simplices have 1 to 3 vertices, got {len(vertices)}")
            points = [_vertex(v) for v in vertices]
            if len(set(points)) != len(points):
                continue  # degenerate
            key, sign = _sort_with_sign(points)
            totals[key] += sign * int(weight)
        return cls({k: w for k, w in totals.items() if w})

    def __add__(self, other: "Superchain") -> "Superchain":
        totals = defaultdict(int, self.terms)
        for key, weight in other.terms.items():
            totals[key] += weight
        return Superchain({k: w for k, w in totals.items() if w})

    def __neg__(self) -> "Superchain":
        return Superchain({k: -w for k, w in self.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def part(self, dimension: int) -> "Superchain":
        return Superchain({k: w for k, w in self.terms.items() if len(k) == dimension + 1})

    @property
    def dimensions(self) -> set[int]:
        return {len(k) - 1 for k in self.terms}

    def __len__(self) -> int:
        return len(self.terms)


def boundary(chain: Superchain) -> Superchain:
    """∂ on each part: ∂[v0,v1] = v1 − v0 and ∂[v0,v1,v2] = [v1,v2] − [v0,v2] + [v0,v1]."""
    faces: list[tuple[Sequence[Vertex], int]] = []
    for vertices, weight in chain.terms.items():
        if len(vertices) == 1:
            continue
        for k in range(len(vertices)):
            face = vertices[:k] + vertices[k + 1:]
            faces.append((face, weight if k % 2 == 0 else -weight))
    return Superchain.from_simplices(faces)


def is_cycle(chain: Superchain) -> bool:
    return not boundary(chain)


# ==============================================================================
# Exact Integration
# ==============================================================================

@lru_cache(maxsize=1)
def _reference_ring():
    return polynomial_ring(("s", "t"))


def _pullback(p: Polynomial, origin: Vertex, edges: Sequence[Vertex]) -> Polynomial:
    """p(origin + s·e1 [+ t·e2]) in QQ[s, t]."""
    ring = _reference_ring()
    s, t = ring.gens
    params = (s, t)[: len(edges)]
    images = []
    for axis in range(2):
        image = ring(origin[axis])
        for param, edge in zip(params, edges):
            image += param * edge[axis]
        images.append(image)
    p = embed(p, worldsheet_space().ring)
    result = ring.zero
    for exponents, coeff in p.terms():
        term = ring(coeff)
        for image, power in zip(images, exponents):
            if power:
                term *= image ** power
        result += term
    return result


def _reference_integral(q: Polynomial, dimension: int):
    """∫ over [0,1] or the unit right triangle: s^a t^b ↦ a! b! / (a + b + dim)!."""
    total = QQ.zero
    for (a, b), coeff in q.terms():
        if dimension == 1:
            total += coeff * QQ(1, a + 1)
        else:
            total += coeff * QQ(factorial(a) * factorial(b), factorial(a + b + 2))
    return total


def _segment_integral(psi1: tuple[Polynomial, Polynomial], vertices: tuple[Vertex, ...]):
    v0, v1 = vertices
    edge = (v1[0] - v0[0], v1[1] - v0[1])
    integrand = _pullback(psi1[0], v0, [edge]) * edge[0] + _pullback(psi1[1], v0, [edge]) * edge[1]
    return _reference_integral(integrand, 1)


def _triangle_integral(psi2: Polynomial, vertices: tuple[Vertex, ...]):
    v0, v1, v2 = vertices
    e1 = (v1[0] - v0[0], v1[1] - v0[1])
    e2 = (v2[0] - v0[0], v2[1] - v0[1])
    jacobian = e1[0] * e2[1] - e1[1] * e2[0]
    return _reference_integral(_pullback(psi2, v0, [e1, e2]), 2) * jacobian


def _point_value(psi0: Polynomial, vertex: Vertex):
    total = QQ.zero
    for exponents, coeff in embed(psi0, worldsheet_space().ring).terms():
        term = coeff
        for coordinate, power in zip(vertex, exponents):
            if power:
                term *= coordinate ** power
        total += term
    return total



def integrate(psi: DeRhamSuperfield, chain: Superchain) -> Rational:
    """∫_C Ψ: ψ0 at points, ψ1 along segments, ψ2 over triangles."""
    total = QQ.zero
    for vertices, weight in chain.terms.items():
        if len(vertices) == 1:
            value = _point_value(psi.psi0, vertices[0])
        elif len(vertices) == 2:
            value = _segment_integral(psi.psi1, vertices)
        else:
            value = _triangle_integral(psi.psi2, vertices)
        total += value * weight
    return to_sympy_rational(total)


def ghost_integrals(psi: DeRhamSuperfield, chain: Superchain) -> dict[str, Rational]:
    """∫_C Ψ_K for every ghost term θ^K Ψ_K, keyed by the joined constant names; zeros dropped."""
    values = {}
    for key, part in psi.ghosts.items():
        value = integrate(part, chain)
        if value:
            values["*".join(key)] = value
    return values



def stokes_check(psi: DeRhamSuperfield, chain: Superchain) -> CheckReport:
    """∫_C dΨ = ∫_∂C Ψ; on a cycle the left side must vanish."""
    volume = integrate(superfield_d(psi), chain)
    edge = integrate(psi, boundary(chain))
    witnesses = []
    if volume != edge:
        witnesses.append(Witness(
            relation="int dPsi - int_boundary Psi",
            location=f"{len(chain)} simplices",
            residual=str(volume - edge),
            residual_value=volume - edge,
        ))
    notes = [f"int dPsi = {volume}", f"int_boundary Psi = {edge}"]
    if is_cycle(chain):
        notes.append("chain is a cycle")
        if volume != 0:
            witnesses.append(Witness(
                relation="int_Z dPsi",
                location="cycle",
                residual=str(volume),
                residual_value=volume,
            ))
    return CheckReport.from_witnesses("stokes", witnesses, checked=2 if is_cycle(chain) else 1, notes=notes)


# ==============================================================================
# Field Configurations
# ==============================================================================

BASIC_ROLES = ("x", "y", "gamma")
DERIVED_ROLES = {"Xt": "x", "Yt": "y", "Gamma": "gamma"}
ROLE_DEGREES = {"x": 0, "y": 1, "gamma": 1}


@dataclass(frozen=True)
class FieldConfiguration:
    """
    Superfields for the basic generators x^i, y_i, γ^a.

    A field of degree D may carry components of every form degree; the
    Grassmann-odd ones are put on odd constants named after the field. X̃, Ỹ
    and Γ are never assigned: they realize as d of their partners.
    """

    fields: Mapping[str, DeRhamSuperfield] = field(default_factory=dict)
    parameters: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        fields = {}
        for name, psi in self.fields.items():
            psi = with_ghost_constants(name, psi)
            if psi.parities() - {psi.degree % 2}:
                raise WorldsheetError(f"Field '{name}' of degree {psi.degree} has components of the wrong parity")
            fields[name] = psi
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "parameters", {k: to_rational(v) for k, v in self.parameters.items()})

    @property
    def has_ghosts(self) -> bool:
        return any(psi.ghosts for psi in self.fields.values())

    def superfield_for(self, table, name: str) -> DeRhamSuperfield:
        g = table[name]
        if g.role in DERIVED_ROLES:
            partner = table.name_for(DERIVED_ROLES[g.role], g.index)
            return superfield_d(self.superfield_for(table, partner))
        if name not in self.fields:
            raise WorldsheetError(f"Generator '{name}' has no assigned superfield")
        psi = self.fields[name]
        if psi.degree != g.degree:
            raise WorldsheetError(f"Field '{name}' has degree {psi.degree}, generator has {g.degree}")
        return psi


def classical_field(degree: int, components: Union[str, Sequence[str]]) -> DeRhamSuperfield:
    """A degree-0 field from one 0-form component, a degree-1 field from a 1-form pair."""
    if degree == 0:
        return DeRhamSuperfield.build(psi0=components, degree=0)
    if degree == 1:
        return DeRhamSuperfield.build(psi1=components, degree=1)
    raise WorldsheetError(f"Classical fields are assigned in degree 0 or 1, not {degree}")


def _power(psi: DeRhamSuperfield, exponent: int) -> DeRhamSuperfield:
    result = DeRhamSuperfield.constant(1)
    for _ in range(exponent):
        result = superfield_product(result, psi)
    return result


def evaluate_configuration(ctx, element: SuperPolynomial, config: FieldConfiguration) -> DeRhamSuperfield:
    """
    Realize an element on the worldsheet.

    Even factors (coordinates and degree-2 generators) are multiplied in as
    powers, parameters are replaced by their configured values, and odd
    factors are multiplied in table order, matching the normal form.
    """
    table = ctx.table if hasattr(ctx, "table") else ctx
    space = table.space
    needed = element.generator_names()
    cache: dict[str, DeRhamSuperfield] = {name: config.superfield_for(table, name) for name in needed}
    missing = [p for p in space.parameters if p not in config.parameters and _uses(element, p)]
    if missing:
        raise WorldsheetError(f"Parameters without a configured value: {missing}")

    ring_names = [str(s) for s in table.ring.symbols]
    result = DeRhamSuperfield.zero()
    for key, coeff in element.terms.items():
        odd = DeRhamSuperfield.constant(1)
        for position in key:
            odd = superfield_product(odd, cache[table.odd[position].name])
        for monom, c in coeff.terms():
            term = DeRhamSuperfield.constant(1).scaled(c)
            for name, exponent in zip(ring_names, monom):
                if not exponent:
                    continue
                if name in table:
                    term = superfield_product(term, _power(cache[name], exponent))
                else:
                    term = term.scaled(config.parameters[name] ** exponent)
            result = result + superfield_product(term, odd)
    return result.with_degree(element.degree() if element else 0)


def _uses(element: SuperPolynomial, name: str) -> bool:
    position = [str(s) for s in element.table.ring.symbols].index(name)
    return any(monom[position] for coeff in element.terms.values() for monom in coeff.monoms())


def realized_lagrangian(ctx, config: FieldConfiguration) -> DeRhamSuperfield:
    return evaluate_configuration(ctx, lagrangian_element(ctx), config)


def action_value(ctx, config: FieldConfiguration, chain: Superchain) -> Rational:
    """∫_C of the top component of the realized Lagrangian, with Γ realized as dγ."""
    if chain.dimensions - {2}:
        raise WorldsheetError("The action is integrated over a chain of triangles only")
    realized = realized_lagrangian(ctx, config)
    return integrate(DeRhamSuperfield.build(psi2=realized.psi2, degree=2), chain)



def pair_observable(ctx, observable: SuperPolynomial, config: FieldConfiguration, cycle: Superchain) -> Rational:
    """⟨Z, O⟩ = ∫_Z of the realized observable; Z must be a cycle."""
    if not is_cycle(cycle):
        raise WorldsheetError("Observables are paired with cycles only")
    return integrate(evaluate_configuration(ctx, observable, config), cycle)


# ==============================================================================
# File Formats
# ==============================================================================

COMMENT_PATTERN = re.compile(r"\s*#.*$")
CHAIN_LINE_PATTERN = re.compile(
    r"^(?P<kind>point|segment|triangle)\s+(?P<coords>[^#]*?)(?:\s+weight\s+(?P<weight>-?\d+))?\s*$"
)
SECTION_PATTERN = re.compile(r"^\[(?P<name>[A-Za-z_]+)\]$")
ENTRY_PATTERN = re.compile(r'^(?P<key>[A-Za-z0-9_.]+)\s*=\s*"(?P<value>[^"]*)"$')


def parse_chain(text: str) -> Superchain:
    """
    One simplex per line: `point z1 z2`, `segment a1 a2 b1 b2`,
    `triangle a1 a2 b1 b2 c1 c2`, each optionally followed by `weight N`.
    """
    simplices = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = COMMENT_PATTERN.sub("", raw).strip()
        if not line:
            continue
        match = CHAIN_LINE_PATTERN.match(line)
        if not match:
            raise ModelFileError(f"Line {number}: cannot read simplex '{line}'")
        values = match.group("coords").split()
        expected = 2 * SIMPLEX_KINDS[match.group("kind")]
        if len(values) != expected:
            raise ModelFileError(
                f"Line {number}: {match.group('kind')} needs {expected} coordinates, got {len(values)}"
            )
        try:
            coords = [to_rational(parse_rational(v)) for v in values]
        except (ExpressionError, ValueError) as exc:
            raise ModelFileError(f"Line {number}: {exc}") from exc
        vertices = [coords[k:k + 2] for k in range(0, expected, 2)]
        simplices.append((vertices, int(match.group("weight") or 1)))
    chain = Superchain.from_simplices(simplices)
    logger.info(f"Parsed superchain with {len(chain)} simplices")
    return chain


def load_chain(path: Union[str, Path]) -> Superchain:
    return parse_chain(Path(path).read_text(encoding="utf-8"))


def format_chain(chain: Superchain) -> str:
    kinds = {1: "point", 2: "segment", 3: "triangle"}
    lines = []
    for vertices, weight in sorted(chain.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        coords = " ".join(format_rational(c) for v in vertices for c in v)
        suffix = "" if weight == 1 else f" weight {weight}"
        lines.append(f"{kinds[len(vertices)]} {coords}{suffix}")
    return "\n".join(lines) + "\n"


def _full_superfield(degree: int, value: str, number: int) -> DeRhamSuperfield:
    """`psi0 | psi1_1, psi1_2 | psi2`; an empty part is zero."""
    parts = [p.strip() for p in value.split("|")]
    if len(parts) != 3:
        raise ModelFileError(f"Line {number}: a full superfield has 3 parts separated by '|', got {len(parts)}")
    pair = [p.strip() for p in parts[1].split(",")] if parts[1] else ["0", "0"]
    if len(pair) != 2:
        raise ModelFileError(f"Line {number}: the 1-form part needs 2 components, got {len(pair)}")
    return DeRhamSuperfield.build(parts[0] or "0", [p or "0" for p in pair], parts[2] or "0", degree)


def parse_configuration(text: str, table) -> FieldConfiguration:
    """
    `[configuration]` entries assign 0-form components to x (`x1 = "z1*z2"`)
    and 1-form pairs to y and γ (`y_x1 = "z1, 0"`); `[parameters]` entries fix
    parameter values (`a = "1/2"`).

    Any field may instead be given in full as `"psi0 | psi1_1, psi1_2 | psi2"`,
    for example `y_x1 = "z1 | 0, z2 | 1"`.
    """

    fields: dict[str, DeRhamSuperfield] = {}
    parameters: dict[str, object] = {}
    section: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = COMMENT_PATTERN.sub("", raw).strip()
        if not line:
            continue
        header = SECTION_PATTERN.match(line)
        if header:
            section = header.group("name")
            if section not in ("configuration", "parameters"):
                raise ModelFileError(f"Line {number}: unknown section [{section}]")
            continue
        entry = ENTRY_PATTERN.match(line)
        if not entry or section is None:
            raise ModelFileError(f"Line {number}: expected key = \"value\" inside a section")
        key, value = entry.group("key"), entry.group("value")
        try:
            if section == "parameters":
                if key not in table.space.parameters:
                    raise ModelFileError(f"Line {number}: unknown parameter '{key}'")
                parameters[key] = parse_rational(value)
                continue
            if key not in table or table[key].role not in BASIC_ROLES:
                raise ModelFileError(f"Line {number}: '{key}' is not an assignable generator")
            degree = ROLE_DEGREES[table[key].role]
            if "|" in value:
                fields[key] = _full_superfield(degree, value, number)
                continue
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != (1 if degree == 0 else 2):
                raise ModelFileError(f"Line {number}: '{key}' needs {1 if degree == 0 else 2} component(s)")
            fields[key] = classical_field(degree, parts[0] if degree == 0 else parts)
        except ExpressionError as exc:
            raise exc.at_line(number) from None
    return FieldConfiguration(fields, parameters)


def load_configuration(path: Union[str, Path], table) -> FieldConfiguration:
    return parse_configuration(Path(path).read_text(encoding="utf-8"), table)
