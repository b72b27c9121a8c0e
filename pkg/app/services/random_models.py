"""
app/services/random_models.py — Seeded random corpora for property checks.

Everything is drawn from numpy's default_rng so a corpus is reproducible
from config.RANDOM_SEED. Coefficients are small rationals; vertices are
rationals with small denominators.
"""

import logging
from typing import Iterator, Optional, Sequence

import numpy as np  # type: ignore
from sympy.polys.domains import QQ  # type: ignore

from config import (  # type: ignore
    RANDOM_COEFFICIENT_RANGE,
    RANDOM_DENOMINATORS,
    RANDOM_MAX_DEGREE,
    RANDOM_SEED,
)
from app.services.exact_algebra import Polynomial, VariableSpace  # type: ignore
from app.services.flat_families import two_dimensional_model  # type: ignore
from app.services.poisson_geometry import PoissonModel  # type: ignore
from app.services.supergraded import GeneratorTable, SuperPolynomial  # type: ignore
from app.services.worldsheet import (  # type: ignore
    DeRhamSuperfield,
    FieldConfiguration,
    Superchain,
    classical_field,
    worldsheet_space,
)

logger = logging.getLogger(__name__)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(RANDOM_SEED if seed is None else seed)


def random_rational(rng: np.random.Generator, allow_zero: bool = True):
    low, high = RANDOM_COEFFICIENT_RANGE
    while True:
        numerator = int(rng.integers(low, high + 1))
        if numerator or allow_zero:
            return QQ(numerator, int(rng.choice(RANDOM_DENOMINATORS)))


def random_polynomial(
    space: VariableSpace,
    rng: np.random.Generator,
    max_degree: int = RANDOM_MAX_DEGREE,
    terms: int = 4,
) -> Polynomial:
    """A sum of `terms` random monomials in the coordinates, total degree ≤ max_degree."""
    ring = space.ring
    n = space.dimension
    result = ring.zero
    for _ in range(terms):
        degree = int(rng.integers(0, max_degree + 1))
        exponents = [0] * ring.ngens
        for _ in range(degree):
            exponents[int(rng.integers(0, n))] += 1
        result += ring.from_dict({tuple(exponents): random_rational(rng)})
    return result


# ==============================================================================
# Worldsheet Corpora
# ==============================================================================

def random_superfield(rng: np.random.Generator, max_degree: int = RANDOM_MAX_DEGREE) -> DeRhamSuperfield:
    space = worldsheet_space()
    return DeRhamSuperfield(
        random_polynomial(space, rng, max_degree),
        (random_polynomial(space, rng, max_degree), random_polynomial(space, rng, max_degree)),
        random_polynomial(space, rng, max_degree),
    )


def _random_vertex(rng: np.random.Generator) -> tuple:
    return tuple(QQ(int(rng.integers(-6, 7)), int(rng.choice(RANDOM_DENOMINATORS))) for _ in range(2))


def random_chain(rng: np.random.Generator) -> Superchain:
    """A triangle fan around a random centre plus a few weighted segments and points."""
    centre = _random_vertex(rng)
    rim = [_random_vertex(rng) for _ in range(int(rng.integers(3, 6)))]
    simplices = []
    for a, b in zip(rim, rim[1:] + rim[:1]):
        simplices.append(([centre, a, b], 1))
    for _ in range(int(rng.integers(0, 3))):
        simplices.append(([_random_vertex(rng), _random_vertex(rng)], int(rng.integers(-2, 3))))
    for _ in range(int(rng.integers(0, 3))):
        simplices.append(([_random_vertex(rng)], int(rng.integers(-2, 3))))
    return Superchain.from_simplices(simplices)


def stokes_corpus(size: int, seed: Optional[int] = None) -> Iterator[tuple[DeRhamSuperfield, Superchain]]:
    rng = make_rng(seed)
    for _ in range(size):
        yield random_superfield(rng), random_chain(rng)


# ==============================================================================
# Algebra Corpora
# ==============================================================================

def random_configuration(
    table: GeneratorTable, rng: np.random.Generator, max_degree: int = 2, inhomogeneous: bool = False
) -> FieldConfiguration:
    """
    Fields for every x, y and γ generator of the table: classical forms, or with
    inhomogeneous=True every form degree, the Grassmann-odd ones on odd constants.
    """
    space = worldsheet_space()
    fields = {}
    for g in table:
        if g.role not in ("x", "y", "gamma"):
            continue
        if inhomogeneous:
            fields[g.name] = random_superfield(rng, max_degree).with_degree(g.degree)
        elif g.role == "x":
            fields[g.name] = classical_field(0, random_polynomial(space, rng, max_degree))
        else:
            fields[g.name] = DeRhamSuperfield(
                space.zero(),
                (random_polynomial(space, rng, max_degree), random_polynomial(space, rng, max_degree)),
                space.zero(),
                1,
            )
    return FieldConfiguration(fields)


def random_element(table: GeneratorTable, rng: np.random.Generator, degree: int, terms: int = 3) -> SuperPolynomial:
    """A homogeneous element: coordinate polynomials times generator words of the given degree."""
    odd = [g.name for g in table if g.degree == 1]
    even = [g.name for g in table if g.degree == 2]
    result = table.zero()
    for _ in range(terms):
        coeff = table.lift(random_polynomial(table.space, rng, max_degree=2, terms=2))
        if degree == 0:
            word = table.one()
        elif degree == 1:
            word = table.generator(odd[int(rng.integers(0, len(odd)))])
        elif even and rng.random() < 0.5:
            word = table.generator(even[int(rng.integers(0, len(even)))])
        else:
            first, second = rng.choice(len(odd), size=2, replace=False)
            word = table.generator(odd[int(first)]) * table.generator(odd[int(second)])
        result = result + coeff * word
    return result


def intertwining_corpus(
    table: GeneratorTable, size: int, seed: Optional[int] = None, inhomogeneous: bool = False
) -> Iterator[tuple[SuperPolynomial, FieldConfiguration]]:
    rng = make_rng(seed)
    for _ in range(size):
        degree = int(rng.integers(0, 3))
        yield random_element(table, rng, degree), random_configuration(table, rng, inhomogeneous=inhomogeneous)



def random_two_dimensional_models(
    size: int, coordinates: Sequence[str] = ("x1", "x2"), seed: Optional[int] = None, max_degree: int = 3
) -> Iterator[PoissonModel]:
    space = VariableSpace(tuple(coordinates))
    rng = make_rng(seed)
    for k in range(size):
        mu = random_polynomial(space, rng, max_degree)
        nu = random_polynomial(space, rng, max_degree)
        yield two_dimensional_model(space, mu, nu, title=f"random 2D #{k}")
