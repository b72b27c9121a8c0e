"""
app/services/poisson_geometry.py — Poisson models, multivectors, forms and the Schouten bracket.

Multivectors are superpolynomials in (x, y) and forms are superpolynomials in
(x, X̃). A p-vector β is stored as Σ_{i1<…<ip} β^{i1…ip} y_{i1}…y_{ip}, so the
components are read back as the coefficient of the ordered y-monomial.

The Schouten bracket is implemented once, as an odd bracket on functions of
(x, y):

    [A, B] = Σ_i (A ∂⃖/∂y_i)(∂B/∂x^i) − (∂A/∂x^i)(∂⃗B/∂y_i)

Under this convention [ϖ, f] = ϖ^{ij}∂_j f y_i, the bracket of vector fields
is their Lie bracket, and the components of [A, B] for two bivectors are
A^{il}∂_l B^{jk} + B^{il}∂_l A^{jk} summed cyclically. In particular the
components of [π, π] are twice the Jacobiator, which is what self-bracket
checks report as their witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Optional, Sequence, Union

from sympy.polys.domains import QQ  # type: ignore

from app.schemas.models import CheckReport, Witness  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    Polynomial,
    VariableSpace,
    embed,
    partial_derivative,
    print_polynomial,
)
from app.services.supergraded import (  # type: ignore
    GeneratorTable,
    SuperPolynomial,
    format_superpolynomial,
)

logger = logging.getLogger(__name__)

Bivector = tuple[tuple[Polynomial, ...], ...]
BIVECTORS = ("varpi", "theta", "pi")


# ==============================================================================
# Poisson Model
# ==============================================================================

def _zero_matrix(space: VariableSpace) -> Bivector:
    n = space.dimension
    return tuple(tuple(space.zero() for _ in range(n)) for _ in range(n))


def bivector_from_components(
    space: VariableSpace, components: Mapping[tuple[str, str], Polynomial]
) -> Bivector:
    """
    Antisymmetric completion of the given entries.

    An entry may be given for (i, j) or (j, i); giving both requires them to
    be negatives of each other.
    """
    n = space.dimension
    index = {c: k for k, c in enumerate(space.coordinates)}
    rows = [[space.zero() for _ in range(n)] for _ in range(n)]
    given: set[tuple[int, int]] = set()
    for (a, b), value in components.items():
        if a not in index or b not in index:
            raise AlgebraError(f"Unknown coordinate pair ({a}, {b})")
        i, j = index[a], index[b]
        value = embed(value, space.ring)
        if i == j:
            if value:
                raise AlgebraError(f"Diagonal entry ({a}, {a}) must vanish")
            continue
        if (i, j) in given or (j, i) in given:
            if rows[i][j] != value:
                raise AlgebraError(f"Entries ({a}, {b}) and ({b}, {a}) are not antisymmetric")
            continue
        rows[i][j] = value
        rows[j][i] = -value
        given.add((i, j))
    return tuple(tuple(row) for row in rows)


def _add(a: Bivector, b: Bivector) -> Bivector:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


@dataclass(frozen=True)
class PoissonModel:
    """
    A chart with two bivectors ϖ and ϑ; π = ϖ + ϑ.

    Antisymmetry is a constructor guarantee. Being Poisson or compatible is
    not: those are checked explicitly.
    """

    space: VariableSpace
    varpi: Bivector
    theta: Bivector = ()
    title: str = ""

    def __post_init__(self):
        n = self.space.dimension
        theta = self.theta or _zero_matrix(self.space)
        for label, matrix in (("varpi", self.varpi), ("theta", theta)):
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise AlgebraError(f"{label} must be a {n}x{n} matrix")
        varpi = tuple(tuple(embed(p, self.space.ring) for p in row) for row in self.varpi)
        theta = tuple(tuple(embed(p, self.space.ring) for p in row) for row in theta)
        for label, matrix in (("varpi", varpi), ("theta", theta)):
            for i in range(n):
                for j in range(n):
                    if matrix[i][j] != -matrix[j][i]:
                        a, b = self.space.coordinates[i], self.space.coordinates[j]
                        raise AlgebraError(f"{label} is not antisymmetric at ({a}, {b})")
        object.__setattr__(self, "varpi", varpi)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_components(
        cls,
        space: VariableSpace,
        varpi: Mapping[tuple[str, str], Polynomial],
        theta: Optional[Mapping[tuple[str, str], Polynomial]] = None,
        title: str = "",
    ) -> "PoissonModel":
        return cls(
            space,
            bivector_from_components(space, varpi),
            bivector_from_components(space, theta or {}),
            title,
        )

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.space.coordinates

    @property
    def pi(self) -> Bivector:
        return _add(self.varpi, self.theta)

    def bivector(self, choice: str = "pi") -> Bivector:
        if choice == "varpi":
            return self.varpi
        if choice == "theta":
            return self.theta
        if choice == "pi":
            return self.pi
        raise AlgebraError(f"Unknown bivector '{choice}', expected one of {BIVECTORS}")

    def components(self, choice: str = "pi") -> dict[tuple[str, str], Polynomial]:
        """Nonzero upper-triangular entries."""
        matrix = self.bivector(choice)
        coords = self.coordinates
        return {
            (coords[i], coords[j]): matrix[i][j]
            for i, j in combinations(range(self.dimension), 2)
            if matrix[i][j]
        }

    def with_theta(self, theta: Bivector) -> "PoissonModel":
        return replace(self, theta=theta)


# ==============================================================================
# Multivectors & Forms
# ==============================================================================

@lru_cache(maxsize=64)
def geometry_table(space: VariableSpace) -> GeneratorTable:
    """Generators x, X̃, y over the chart: enough for multivectors and forms."""
    return GeneratorTable.standard(space, roles=("x", "Xt", "y"))


def _degree_in(value: SuperPolynomial, role: str) -> set[int]:
    table = value.table
    degrees = set()
    for key in value.terms:
        roles = {table.odd[k].role for k in key}
        if roles - {role}:
            raise AlgebraError(
                f"Element contains {sorted(roles - {role})} generators; expected only {role}"
            )
        degrees.add(len(key))
    for coeff in value.terms.values():
        for monom in coeff.monoms():
            for i, exponent in enumerate(monom):
                if exponent and table._even_degree[i]:
                    raise AlgebraError("Element contains degree-2 generators")
    return degrees


@dataclass(frozen=True)
class Multivector:
    """A p-vector: a superpolynomial in x and y of pure y-degree p."""

    value: SuperPolynomial
    degree: int = field(init=False)

    def __post_init__(self):
        degrees = _degree_in(self.value, "y")
        if len(degrees) > 1:
            raise AlgebraError(f"Multivector mixes y-degrees {sorted(degrees)}")
        object.__setattr__(self, "degree", degrees.pop() if degrees else 0)

    @property
    def table(self) -> GeneratorTable:
        return self.value.table

    def components(self) -> dict[tuple[str, ...], Polynomial]:
        return read_components(self.value, "y")

    def __str__(self) -> str:
        return format_superpolynomial(self.value)


@dataclass(frozen=True)
class FormField:
    """A p-form: a superpolynomial in x and X̃ of pure X̃-degree p."""

    value: SuperPolynomial
    degree: int = field(init=False)

    def __post_init__(self):
        degrees = _degree_in(self.value, "Xt")
        if len(degrees) > 1:
            raise AlgebraError(f"Form mixes X̃-degrees {sorted(degrees)}")
        object.__setattr__(self, "degree", degrees.pop() if degrees else 0)

    @property
    def table(self) -> GeneratorTable:
        return self.value.table

    def components(self) -> dict[tuple[str, ...], Polynomial]:
        return read_components(self.value, "Xt")

    def __str__(self) -> str:
        return format_superpolynomial(self.value)


def element_from_components(
    table: GeneratorTable,
    role: str,
    components: Mapping[tuple[str, ...], Polynomial],
) -> SuperPolynomial:
    """Σ c^{i1…ip} g_{i1}…g_{ip} over the given index tuples, in the given order."""
    result = table.zero()
    for indices, coeff in components.items():
        term = table.lift(coeff)
        for c in indices:
            term = term * table.role(role, c)
        result = result + term
    return result


def read_components(value: SuperPolynomial, role: str) -> dict[tuple[str, ...], Polynomial]:
    """Coefficients of g_{i1}…g_{ip} with i1<…<ip in coordinate order."""
    table = value.table
    coords = table.space.coordinates
    position = {c: k for k, c in enumerate(coords)}
    result: dict[tuple[str, ...], Polynomial] = {}
    for key in value.terms:
        indices = tuple(sorted((table.odd[k].index for k in key), key=position.__getitem__))
        names = [table.name_for(role, c) for c in indices]
        result[indices] = value.coefficient(names)
    return result


def multivector(table: GeneratorTable, components: Mapping[tuple[str, ...], Polynomial]) -> Multivector:
    return Multivector(element_from_components(table, "y", components))


def form_field(table: GeneratorTable, components: Mapping[tuple[str, ...], Polynomial]) -> FormField:
    return FormField(element_from_components(table, "Xt", components))


def function_element(table: GeneratorTable, f: Polynomial) -> Multivector:
    return Multivector(table.lift(f))


def bivector_element(table: GeneratorTable, matrix: Bivector) -> SuperPolynomial:
    coords = table.space.coordinates
    return element_from_components(
        table,
        "y",
        {
            (coords[i], coords[j]): matrix[i][j]
            for i, j in combinations(range(len(coords)), 2)
            if matrix[i][j]
        },
    )


def vector_element(table: GeneratorTable, components: Sequence[Polynomial]) -> SuperPolynomial:
    coords = table.space.coordinates
    return element_from_components(
        table, "y", {(c,): v for c, v in zip(coords, components) if v}
    )


# ==============================================================================
# Schouten Bracket & Derived Operators
# ==============================================================================

def odd_bracket(A: SuperPolynomial, B: SuperPolynomial) -> SuperPolynomial:
    """The generating-function Schouten bracket on superpolynomials in (x, y)."""
    if A.table is not B.table:
        raise AlgebraError("Schouten bracket of elements from different tables")
    table = A.table
    result = table.zero()
    for c in table.space.coordinates:
        y = table.name_for("y", c)
        result = result + A.right_derivative(y) * B.even_derivative(c)
        result = result - A.even_derivative(c) * B.left_derivative(y)
    return result


def schouten_bracket(A: Multivector, B: Multivector) -> Multivector:
    return Multivector(odd_bracket(A.value, B.value))


def poisson_bracket(model: PoissonModel, f: Polynomial, g: Polynomial, bivector: str = "varpi") -> Polynomial:
    """{f, g} = π^{ij} ∂_i f ∂_j g for the chosen bivector."""
    matrix = model.bivector(bivector)
    space = model.space
    coords = space.coordinates
    df = [partial_derivative(f, c, space) for c in coords]
    dg = [partial_derivative(g, c, space) for c in coords]
    result = space.zero()
    for i in range(len(coords)):
        if not df[i]:
            continue
        for j in range(len(coords)):
            if matrix[i][j] and dg[j]:
                result += matrix[i][j] * df[i] * dg[j]
    return result


def hamilton_components(model: PoissonModel, f: Polynomial, bivector: str = "varpi") -> list[Polynomial]:
    """u_f^i = −π^{ij} ∂_j f."""
    matrix = model.bivector(bivector)
    space = model.space
    grad = [partial_derivative(f, c, space) for c in space.coordinates]
    return [
        -sum((matrix[i][j] * grad[j] for j in range(len(grad))), space.zero())
        for i in range(len(grad))
    ]


def hamilton_vector_field(
    model: PoissonModel,
    f: Polynomial,
    bivector: str = "varpi",
    table: Optional[GeneratorTable] = None,
) -> Multivector:
    """u_f = −[π, f], as a 1-vector."""
    table = table or geometry_table(model.space)
    pi = bivector_element(table, model.bivector(bivector))
    return Multivector(-odd_bracket(pi, table.lift(f)))


def lichnerowicz_differential(
    model: PoissonModel, Z: Multivector, bivector: str = "varpi"
) -> Multivector:
    """qζ = [π, ζ]."""
    pi = bivector_element(Z.table, model.bivector(bivector))
    return Multivector(odd_bracket(pi, Z.value))


def casimir_components(model: PoissonModel, f: Polynomial, bivector: str = "pi") -> list[Polynomial]:
    """π^{ij} ∂_j f for each i."""
    return [-u for u in hamilton_components(model, f, bivector)]


def verify_casimir(model: PoissonModel, f: Polynomial, bivector: str = "pi") -> CheckReport:
    """PASS iff every π^{ij}∂_j f vanishes identically (parameters symbolic)."""
    components = casimir_components(model, f, bivector)
    witnesses = [
        Witness(
            relation=f"[{bivector},f]",
            location=c,
            residual=print_polynomial(value),
            residual_value=value,
        )
        for c, value in zip(model.coordinates, components)
        if value
    ]
    if witnesses:
        logger.info(f"Casimir check failed for {print_polynomial(f)} against {bivector}")
    return CheckReport.from_witnesses(f"casimir {bivector}", witnesses, checked=len(components))


# ==============================================================================
# Component Formulas
# ==============================================================================

def _cyclic_term(a: Bivector, b: Bivector, space: VariableSpace, i: int, j: int, k: int) -> Polynomial:
    """Σ_l a^{il} ∂_l b^{jk}."""
    total = space.zero()
    for l, c in enumerate(space.coordinates):
        if a[i][l]:
            d = partial_derivative(b[j][k], c, space)
            if d:
                total += a[i][l] * d
    return total


def jacobiator(matrix: Bivector, space: VariableSpace) -> dict[tuple[str, str, str], Polynomial]:
    """π^{il}∂_lπ^{jk} + π^{jl}∂_lπ^{ki} + π^{kl}∂_lπ^{ij} for i<j<k."""
    coords = space.coordinates
    result = {}
    for i, j, k in combinations(range(len(coords)), 3):
        result[(coords[i], coords[j], coords[k])] = (
            _cyclic_term(matrix, matrix, space, i, j, k)
            + _cyclic_term(matrix, matrix, space, j, k, i)
            + _cyclic_term(matrix, matrix, space, k, i, j)
        )
    return result


def compatibility_components(
    a: Bivector, b: Bivector, space: VariableSpace
) -> dict[tuple[str, str, str], Polynomial]:
    """a^{il}∂_l b^{jk} + b^{il}∂_l a^{jk}, both summed cyclically, for i<j<k."""
    coords = space.coordinates
    result = {}
    for i, j, k in combinations(range(len(coords)), 3):
        total = space.zero()
        for p, q, r in ((i, j, k), (j, k, i), (k, i, j)):
            total += _cyclic_term(a, b, space, p, q, r) + _cyclic_term(b, a, space, p, q, r)
        result[(coords[i], coords[j], coords[k])] = total
    return result


def poisson_vector_field_components(
    model: PoissonModel, u: Sequence[Polynomial], bivector: str = "varpi"
) -> dict[tuple[str, str], Polynomial]:
    """u^k∂_kϖ^{ij} − ∂_ku^i ϖ^{kj} − ∂_ku^j ϖ^{ik} for i<j."""
    matrix = model.bivector(bivector)
    space = model.space
    coords = space.coordinates
    n = len(coords)
    du = [[partial_derivative(u[i], c, space) for c in coords] for i in range(n)]
    result = {}
    for i, j in combinations(range(n), 2):
        total = space.zero()
        for k, c in enumerate(coords):
            if u[k]:
                total += u[k] * partial_derivative(matrix[i][j], c, space)
            total -= du[i][k] * matrix[k][j] + du[j][k] * matrix[i][k]
        result[(coords[i], coords[j])] = total
    return result


def _bracket_components(value: SuperPolynomial) -> dict[tuple[str, ...], Polynomial]:
    return read_components(value, "y")


def _component_witnesses(
    relation: str, components: Mapping[tuple[str, ...], Polynomial], scale=1
) -> list[Witness]:
    witnesses = []
    for indices, value in components.items():
        if not value:
            continue
        value = value * scale if scale != 1 else value
        witnesses.append(
            Witness(
                relation=relation,
                location=",".join(indices),
                residual=print_polynomial(value),
                residual_value=value,
            )
        )
    return witnesses


def self_bracket_check(model: PoissonModel, bivector: str, name: str) -> CheckReport:
    """[π, π] = 0 through the Schouten bracket; witnesses are Jacobiator components."""
    table = geometry_table(model.space)
    pi = bivector_element(table, model.bivector(bivector))
    components = _bracket_components(odd_bracket(pi, pi))
    witnesses = _component_witnesses(f"[{bivector},{bivector}]", components, scale=QQ(1, 2))
    checked = len(list(combinations(model.coordinates, 3)))
    if witnesses:
        logger.info(f"{name}: Jacobi identity fails in {len(witnesses)} component(s)")
    return CheckReport.from_witnesses(name, witnesses, checked)


def compatibility_check(model: PoissonModel) -> CheckReport:
    """[ϖ, ϑ] = 0 through the Schouten bracket."""
    table = geometry_table(model.space)
    varpi = bivector_element(table, model.varpi)
    theta = bivector_element(table, model.theta)
    components = _bracket_components(odd_bracket(varpi, theta))
    witnesses = _component_witnesses("[varpi,theta]", components)
    checked = len(list(combinations(model.coordinates, 3)))
    if witnesses:
        logger.info(f"compatibility fails in {len(witnesses)} component(s)")
    return CheckReport.from_witnesses("compatibility", witnesses, checked)


def model_structure_check(model: PoissonModel) -> list[CheckReport]:
    """
    [ϖ,ϖ] = 0, [ϑ,ϑ] = 0 and [ϖ,ϑ] = 0, reported separately.

    Together they give [π,π] = 0 and [π,ϖ] = 0 for π = ϖ + ϑ.
    """
    logger.info(f"Structure check for model '{model.title or model.coordinates}'")
    return [
        self_bracket_check(model, "varpi", "poisson varpi"),
        self_bracket_check(model, "theta", "poisson theta"),
        compatibility_check(model),
    ]


def poisson_vector_field_check(
    model: PoissonModel, u: Multivector, bivector: str = "varpi"
) -> CheckReport:
    """[u, π] = 0: the vector field u leaves the bivector invariant."""
    if u.degree != 1 and u.value:
        raise AlgebraError(f"Expected a vector field, got a {u.degree}-vector")
    pi = bivector_element(u.table, model.bivector(bivector))
    components = _bracket_components(odd_bracket(u.value, pi))
    witnesses = _component_witnesses(f"[u,{bivector}]", components)
    return CheckReport.from_witnesses(
        "poisson vector field", witnesses, checked=len(list(combinations(model.coordinates, 2)))
    )


def vector_components(u: Multivector) -> list[Polynomial]:
    table = u.table
    ring = table.ring
    comps = u.components()
    return [comps.get((c,), ring.zero) for c in table.space.coordinates]


# ==============================================================================
# Forms
# ==============================================================================

def form_differential(sigma: FormField) -> FormField:
    """d_M σ = X̃^i ∂_i σ."""
    table = sigma.table
    result = table.zero()
    for c in table.space.coordinates:
        result = result + table.role("Xt", c) * sigma.value.even_derivative(c)
    return FormField(result)


def interior_product(u: Multivector, sigma: FormField) -> FormField:
    """j_M(u) σ = u^i ∂⃗σ/∂X̃^i."""
    if u.table is not sigma.table:
        raise AlgebraError("Vector field and form live in different tables")
    table = sigma.table
    result = table.zero()
    for c, component in zip(table.space.coordinates, vector_components(u)):
        if component:
            result = result + table.lift(component) * sigma.value.left_derivative(table.name_for("Xt", c))
    return FormField(result)


def lie_derivative(u: Multivector, target: Union[Multivector, FormField]) -> Union[Multivector, FormField]:
    """[u, β] on multivectors; j_M(u)d_M + d_M j_M(u) on forms."""
    if isinstance(target, Multivector):
        return schouten_bracket(u, target)
    left = interior_product(u, form_differential(target))
    right = form_differential(interior_product(u, target))
    return FormField(left.value + right.value)
