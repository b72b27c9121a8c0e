"""
app/services/flat_families.py — Bivector families written through a flat Levi-Civita tensor.

In dimension 2, 3 and 4 every bivector is the Levi-Civita dual of a function,
a 1-form or a 2-form. With a flat auxiliary metric the connection drops out,
so the Poisson, compatibility and Casimir conditions become literal
polynomial formulas in the dual data. Those formulas are computed here and
cross-checked against the Schouten bracket in the tests.
"""

import logging
from itertools import permutations
from typing import Sequence

from sympy import LeviCivita  # type: ignore
from sympy.polys.domains import QQ  # type: ignore

from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    Polynomial,
    VariableSpace,
    embed,
    partial_derivative,
)
from app.services.poisson_geometry import Bivector, PoissonModel  # type: ignore

logger = logging.getLogger(__name__)

TwoForm = tuple[tuple[Polynomial, ...], ...]


def _epsilon(*indices: int) -> int:
    return int(LeviCivita(*indices))


def _require_dimension(space: VariableSpace, n: int) -> None:
    if space.dimension != n:
        raise AlgebraError(f"Expected a {n}-dimensional chart, got {space.dimension}")


def _lift_all(space: VariableSpace, values: Sequence[Polynomial]) -> list[Polynomial]:
    return [embed(v, space.ring) for v in values]


# ==============================================================================
# Duals
# ==============================================================================

def bivector_from_function(space: VariableSpace, alpha: Polynomial) -> Bivector:
    """ζ^{ij} = ε^{ij} α in two dimensions."""
    _require_dimension(space, 2)
    a = embed(alpha, space.ring)
    zero = space.zero()
    return ((zero, a), (-a, zero))


def bivector_from_one_form(space: VariableSpace, alpha: Sequence[Polynomial]) -> Bivector:
    """ζ^{ij} = ε^{ijk} α_k in three dimensions."""
    _require_dimension(space, 3)
    a = _lift_all(space, alpha)
    rows = [[space.zero() for _ in range(3)] for _ in range(3)]
    for i, j, k in permutations(range(3)):
        rows[i][j] += a[k] * _epsilon(i, j, k)
    return tuple(tuple(row) for row in rows)


def bivector_from_two_form(space: VariableSpace, alpha: TwoForm) -> Bivector:
    """ζ^{ij} = ½ ε^{ijkl} α_{kl} in four dimensions."""
    _require_dimension(space, 4)
    a = [_lift_all(space, row) for row in alpha]
    for i in range(4):
        for j in range(4):
            if a[i][j] != -a[j][i]:
                raise AlgebraError(f"2-form is not antisymmetric at ({i}, {j})")
    rows = [[space.zero() for _ in range(4)] for _ in range(4)]
    for i, j, k, l in permutations(range(4)):
        rows[i][j] += a[k][l] * (QQ(_epsilon(i, j, k, l), 2))
    return tuple(tuple(row) for row in rows)


def one_form_from_bivector(space: VariableSpace, zeta: Bivector) -> list[Polynomial]:
    """α_k = ½ ε_{kij} ζ^{ij}, the inverse of bivector_from_one_form."""
    _require_dimension(space, 3)
    alpha = [space.zero() for _ in range(3)]
    for k, i, j in permutations(range(3)):
        alpha[k] += zeta[i][j] * QQ(_epsilon(k, i, j), 2)
    return alpha


def two_form_from_bivector(space: VariableSpace, zeta: Bivector) -> TwoForm:
    """α_{kl} = ½ ε_{klij} ζ^{ij}, the inverse of bivector_from_two_form."""
    _require_dimension(space, 4)
    rows = [[space.zero() for _ in range(4)] for _ in range(4)]
    for k, l, i, j in permutations(range(4)):
        rows[k][l] += zeta[i][j] * QQ(_epsilon(k, l, i, j), 2)
    return tuple(tuple(row) for row in rows)


# ==============================================================================
# Model Builders
# ==============================================================================

def two_dimensional_model(space: VariableSpace, mu: Polynomial, nu: Polynomial, title: str = "") -> PoissonModel:
    """ϖ = ε μ, ϑ = ε ν. Always Poisson and compatible, whatever μ and ν are."""
    return PoissonModel(space, bivector_from_function(space, mu), bivector_from_function(space, nu), title)


def three_dimensional_model(
    space: VariableSpace, mu: Sequence[Polynomial], nu: Sequence[Polynomial], title: str = ""
) -> PoissonModel:
    return PoissonModel(space, bivector_from_one_form(space, mu), bivector_from_one_form(space, nu), title)


def four_dimensional_model(space: VariableSpace, mu: TwoForm, nu: TwoForm, title: str = "") -> PoissonModel:
    return PoissonModel(space, bivector_from_two_form(space, mu), bivector_from_two_form(space, nu), title)


def r2s1_model(space: VariableSpace, P: Polynomial, Q: Polynomial, title: str = "R2 x S1") -> PoissonModel:
    """
    {x2, φ} = P for ϖ and {x1, φ} = −Q for ϑ on coordinates (x1, x2, φ).

    P and Q may depend on x1 and x2 only; φ is kept as a formal coordinate.
    """
    _require_dimension(space, 3)
    phi = space.gen(space.coordinates[2])
    for label, value in (("P", P), ("Q", Q)):
        if partial_derivative(value, space.coordinates[2], space):
            raise AlgebraError(f"{label} must not depend on {phi}")
    zero = space.zero()
    p, q = embed(P, space.ring), embed(Q, space.ring)
    varpi = ((zero, zero, zero), (zero, zero, p), (zero, -p, zero))
    theta = ((zero, zero, -q), (zero, zero, zero), (q, zero, zero))
    return PoissonModel(space, varpi, theta, title)


# ==============================================================================
# Literal Conditions
# ==============================================================================

def _curl_pairing(space: VariableSpace, a: Sequence[Polynomial], b: Sequence[Polynomial]) -> Polynomial:
    """ε^{ijk} a_i ∂_j b_k."""
    coords = space.coordinates
    total = space.zero()
    for i, j, k in permutations(range(3)):
        if a[i]:
            total += a[i] * partial_derivative(b[k], coords[j], space) * _epsilon(i, j, k)
    return total


def flat_conditions_3d(
    space: VariableSpace, mu: Sequence[Polynomial], nu: Sequence[Polynomial]
) -> tuple[Polynomial, Polynomial, Polynomial]:
    """
    ε^{ijk}μ_i∂_jμ_k, ε^{ijk}(μ_i∂_jν_k + ν_i∂_jμ_k), ε^{ijk}ν_i∂_jν_k.

    All three vanish iff ϖ, ϑ are Poisson and compatible. The first is
    minus the Jacobiator component of ϖ.
    """
    _require_dimension(space, 3)
    m, n = _lift_all(space, mu), _lift_all(space, nu)
    return (
        _curl_pairing(space, m, m),
        _curl_pairing(space, m, n) + _curl_pairing(space, n, m),
        _curl_pairing(space, n, n),
    )


def flat_casimir_residual_3d(
    space: VariableSpace, mu: Sequence[Polynomial], nu: Sequence[Polynomial], f: Polynomial
) -> list[Polynomial]:
    """ε^{ijk}(μ+ν)_j∂_k f for each i; equals −π^{ij}∂_j f."""
    _require_dimension(space, 3)
    s = [a + b for a, b in zip(_lift_all(space, mu), _lift_all(space, nu))]
    grad = [partial_derivative(f, c, space) for c in space.coordinates]
    result = [space.zero() for _ in range(3)]
    for i, j, k in permutations(range(3)):
        result[i] += s[j] * grad[k] * _epsilon(i, j, k)
    return result


def flat_casimir_residual_4d(space: VariableSpace, mu: TwoForm, nu: TwoForm, f: Polynomial) -> list[Polynomial]:
    """ε^{ijkl}(μ+ν)_{jk}∂_l f for each i; equals 2π^{ij}∂_j f."""
    _require_dimension(space, 4)
    s = [
        [embed(a, space.ring) + embed(b, space.ring) for a, b in zip(row_m, row_n)]
        for row_m, row_n in zip(mu, nu)
    ]
    grad = [partial_derivative(f, c, space) for c in space.coordinates]
    result = [space.zero() for _ in range(4)]
    for i, j, k, l in permutations(range(4)):
        if s[j][k] and grad[l]:
            result[i] += s[j][k] * grad[l] * _epsilon(i, j, k, l)
    return result


def r2s1_casimir_conditions(space: VariableSpace, P: Polynomial, Q: Polynomial, f: Polynomial) -> list[Polynomial]:
    """P∂_{x2}f − Q∂_{x1}f, P∂_φ f and Q∂_φ f."""
    _require_dimension(space, 3)
    x1, x2, phi = space.coordinates
    p, q = embed(P, space.ring), embed(Q, space.ring)
    d = {c: partial_derivative(f, c, space) for c in (x1, x2, phi)}
    return [p * d[x2] - q * d[x1], p * d[phi], q * d[phi]]


def two_dimensional_casimir_residual(space: VariableSpace, mu: Polynomial, nu: Polynomial, f: Polynomial) -> list[Polynomial]:
    """(μ+ν)∂_i f for each i."""
    _require_dimension(space, 2)
    s = embed(mu, space.ring) + embed(nu, space.ring)
    return [s * partial_derivative(f, c, space) for c in space.coordinates]
