"""
app/services/casimir_service.py — Exact Casimir search over bounded-degree polynomials.

The Casimir condition π^{ij}∂_j f = 0 is linear in the coefficients of f.
Restricted to polynomials of total degree ≤ d in the coordinates, it becomes
a rational matrix whose null space is the Casimir space. Unknowns are the
monomial coefficients (constant first, then by degree); equations are the
coefficients of every coordinate/parameter monomial of every component.
"""

import logging
from itertools import combinations_with_replacement
from typing import Mapping, Optional

from sympy import Matrix, Rational  # type: ignore

from app.schemas.models import CasimirSearchResult  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    Polynomial,
    RationalLike,
    VariableSpace,
    print_polynomial,
    substitute_parameters,
    to_rational,
    to_sympy_rational,
)
from app.services.poisson_geometry import (  # type: ignore
    PoissonModel,
    casimir_components,
)

logger = logging.getLogger(__name__)


def monomial_basis(space: VariableSpace, max_degree: int) -> list[Polynomial]:
    """All coordinate monomials of total degree ≤ max_degree, constant first."""
    monomials = [space.constant(1)]
    gens = [space.gen(c) for c in space.coordinates]
    for degree in range(1, max_degree + 1):
        for combo in combinations_with_replacement(range(len(gens)), degree):
            term = space.constant(1)
            for k in combo:
                term *= gens[k]
            monomials.append(term)
    return monomials


def specialize_model(model: PoissonModel, values: Mapping[str, RationalLike]) -> PoissonModel:
    """Fix some parameters to rational values in both bivectors."""
    if not values:
        return model
    space = model.space

    def _fix(matrix):
        return tuple(tuple(substitute_parameters(p, values, space) for p in row) for row in matrix)

    return PoissonModel(space, _fix(model.varpi), _fix(model.theta), model.title)


def casimir_search(
    model: PoissonModel,
    bivector: str = "pi",
    max_degree: int = 2,
    parameter_values: Optional[Mapping[str, RationalLike]] = None,
) -> list[Polynomial]:
    """
    Basis of {f : deg f ≤ max_degree, π^{ij}∂_j f = 0} with rational coefficients.

    The basis is the reduced row echelon form of the null space, so it is
    canonical and its first element is the constant 1.
    """
    if max_degree < 0:
        raise AlgebraError("max_degree must be non-negative")
    model = specialize_model(model, parameter_values or {})
    unknowns = monomial_basis(model.space, max_degree)

    # equation key (component index, monomial) -> column -> coefficient
    equations: dict[tuple[int, tuple[int, ...]], dict[int, Rational]] = {}
    for column, monomial in enumerate(unknowns):
        for i, component in enumerate(casimir_components(model, monomial, bivector)):
            for monom, coeff in component.terms():
                equations.setdefault((i, monom), {})[column] = to_sympy_rational(coeff)

    width = len(unknowns)
    if not equations:
        null_vectors = [[1 if k == j else 0 for k in range(width)] for j in range(width)]
    else:
        rows = [[row.get(k, 0) for k in range(width)] for row in equations.values()]
        null_vectors = [list(v) for v in Matrix(rows).nullspace()]
    logger.info(
        f"Casimir search ({bivector}, degree ≤ {max_degree}): "
        f"{len(equations)} equations, {width} unknowns, nullity {len(null_vectors)}"
    )
    if not null_vectors:
        return []

    reduced, pivots = Matrix(null_vectors).rref()
    ring = model.space.ring
    basis = []
    for r in range(len(pivots)):
        poly = ring.zero
        for k in range(width):
            value = reduced[r, k]
            if value != 0:
                poly += unknowns[k] * to_rational(Rational(value))
        basis.append(poly)
    return basis


def casimir_search_result(
    model: PoissonModel,
    bivector: str = "pi",
    max_degree: int = 2,
    parameter_values: Optional[Mapping[str, RationalLike]] = None,
) -> CasimirSearchResult:
    basis = casimir_search(model, bivector, max_degree, parameter_values)
    return CasimirSearchResult(
        bivector=bivector,
        max_degree=max_degree,
        dimension=len(basis),
        basis=[print_polynomial(p) for p in basis],
        parameter_values={k: str(v) for k, v in (parameter_values or {}).items()},
    )
