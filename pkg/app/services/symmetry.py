"""
app/services/symmetry.py — Lie algebras, Hamilton and Poisson actions, affine Lie–Poisson models.

A LieAlgebra is a named basis t_a with rational structure constants
c^c_{ab}, stored under the key (a, b, c). An ActionSpec is either a Hamilton
action (functions h_a, acting through their Hamilton vector fields under ϖ)
or a Poisson action (declared vector fields v_a).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence, Union

from sympy.polys.domains import QQ  # type: ignore

from app.schemas.models import CheckReport, Witness  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    IDENTIFIER_PATTERN,
    AlgebraError,
    Polynomial,
    RationalLike,
    VariableSpace,
    embed,
    format_rational,
    partial_derivative,
    print_polynomial,
    to_rational,
)
from app.services.poisson_geometry import (  # type: ignore
    PoissonModel,
    bivector_element,
    casimir_components,
    geometry_table,
    hamilton_components,
    odd_bracket,
    poisson_bracket,
    poisson_vector_field_components,
    read_components,
    vector_element,
)

logger = logging.getLogger(__name__)

HAMILTON = "hamilton"
POISSON = "poisson"


# ==============================================================================
# Lie Algebra
# ==============================================================================

@dataclass(frozen=True)
class LieAlgebra:
    """Finite-dimensional Lie algebra: [t_a, t_b] = c^c_{ab} t_c."""

    basis: tuple[str, ...] = ()
    constants: Mapping[tuple[str, str, str], object] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.basis)) != len(self.basis):
            raise AlgebraError(f"Duplicate basis names in {self.basis}")
        for name in self.basis:
            if not IDENTIFIER_PATTERN.match(name):
                raise AlgebraError(f"'{name}' is not a valid basis name")
        cleaned = {}
        for key, value in self.constants.items():
            unknown = [t for t in key if t not in self.basis]
            if unknown:
                raise AlgebraError(f"Structure constant {key} uses unknown basis names {unknown}")
            value = to_rational(value)
            if value:
                cleaned[tuple(key)] = value
        object.__setattr__(self, "constants", cleaned)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def c(self, a: str, b: str, c: str):
        """c^c_{ab}."""
        return self.constants.get((a, b, c), QQ.zero)

    @property
    def is_abelian(self) -> bool:
        return not self.constants


def verify_lie_algebra(L: LieAlgebra) -> CheckReport:
    """Antisymmetry c^c_{ab} = −c^c_{ba} and the Jacobi identity, exactly."""
    witnesses: list[Witness] = []
    checked = 0
    for a, b in _pairs_with_diagonal(L.basis):
        for c in L.basis:
            checked += 1
            residual = L.c(a, b, c) + L.c(b, a, c)
            if residual:
                witnesses.append(Witness(
                    relation="antisymmetry",
                    location=f"c^{c}_({a},{b})",
                    residual=format_rational(residual),
                    residual_value=residual,
                ))
    for a, b, c in combinations(L.basis, 3):
        for d in L.basis:
            checked += 1
            residual = QQ.zero
            for e in L.basis:
                residual += (
                    L.c(a, b, e) * L.c(e, c, d)
                    + L.c(b, c, e) * L.c(e, a, d)
                    + L.c(c, a, e) * L.c(e, b, d)
                )
            if residual:
                witnesses.append(Witness(
                    relation="jacobi",
                    location=f"({a},{b},{c}) -> {d}",
                    residual=format_rational(residual),
                    residual_value=residual,
                ))
    if witnesses:
        logger.info(f"Lie algebra check failed with {len(witnesses)} witness(es)")
    return CheckReport.from_witnesses("lie algebra", witnesses, checked)


def _pairs_with_diagonal(basis: Sequence[str]):
    for i, a in enumerate(basis):
        for b in basis[i:]:
            yield a, b


# ==============================================================================
# Actions
# ==============================================================================

@dataclass(frozen=True)
class ActionSpec:
    """Hamilton action h_a or Poisson action v_a, indexed like the Lie algebra basis."""

    kind: str = HAMILTON
    hamiltonians: tuple[Polynomial, ...] = ()
    vector_fields: tuple[tuple[Polynomial, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in (HAMILTON, POISSON):
            raise AlgebraError(f"Unknown action kind '{self.kind}'")

    @classmethod
    def hamilton(cls, hamiltonians: Sequence[Polynomial]) -> "ActionSpec":
        return cls(HAMILTON, tuple(hamiltonians), ())

    @classmethod
    def poisson(cls, vector_fields: Sequence[Sequence[Polynomial]]) -> "ActionSpec":
        return cls(POISSON, (), tuple(tuple(v) for v in vector_fields))

    @property
    def is_hamilton(self) -> bool:
        return self.kind == HAMILTON

    @property
    def size(self) -> int:
        return len(self.hamiltonians) if self.is_hamilton else len(self.vector_fields)


def _require_sizes(model: PoissonModel, L: LieAlgebra, action: ActionSpec) -> None:
    if action.size != L.dimension:
        raise AlgebraError(
            f"Action has {action.size} entries but the Lie algebra has dimension {L.dimension}"
        )
    if not action.is_hamilton:
        for v in action.vector_fields:
            if len(v) != model.dimension:
                raise AlgebraError(
                    f"Vector field has {len(v)} components for a {model.dimension}-dimensional chart"
                )


def hamilton_vector_fields(model: PoissonModel, action: ActionSpec) -> list[list[Polynomial]]:
    """v_a = u_{h_a} under ϖ for a Hamilton action; the declared fields otherwise."""
    if action.is_hamilton:
        return [hamilton_components(model, h, "varpi") for h in action.hamiltonians]
    return [[embed(p, model.space.ring) for p in v] for v in action.vector_fields]


def verify_action(model: PoissonModel, L: LieAlgebra, action: ActionSpec) -> list[CheckReport]:
    """
    Hamilton: {h_a, h_b}_ϖ = c^c_{ab} h_c and π^{ij}∂_j h_a = 0.
    Poisson: [v_a, v_b] = c^c_{ab} v_c and each v_a leaves ϖ invariant.
    """
    _require_sizes(model, L, action)
    space = model.space
    basis = L.basis
    if action.is_hamilton:
        h = [embed(p, space.ring) for p in action.hamiltonians]
        bracket_witnesses = []
        for (a, ha), (b, hb) in combinations(zip(basis, h), 2):
            expected = sum((hc * L.c(a, b, c) for c, hc in zip(basis, h)), space.zero())
            residual = poisson_bracket(model, ha, hb, "varpi") - expected
            if residual:
                bracket_witnesses.append(Witness(
                    relation="{h_a,h_b} - c^c_ab h_c",
                    location=f"{a},{b}",
                    residual=print_polynomial(residual),
                    residual_value=residual,
                ))
        casimir_witnesses = []
        for a, ha in zip(basis, h):
            for c, value in zip(model.coordinates, casimir_components(model, ha, "pi")):
                if value:
                    casimir_witnesses.append(Witness(
                        relation="[pi,h_a]",
                        location=f"{a}:{c}",
                        residual=print_polynomial(value),
                        residual_value=value,
                    ))
        reports = [
            CheckReport.from_witnesses(
                "action bracket", bracket_witnesses, len(list(combinations(basis, 2)))
            ),
            CheckReport.from_witnesses(
                "action casimir", casimir_witnesses, len(basis) * model.dimension
            ),
        ]
    else:
        table = geometry_table(space)
        fields = hamilton_vector_fields(model, action)
        elements = [vector_element(table, v) for v in fields]
        bracket_witnesses = []
        for (a, va), (b, vb) in combinations(zip(basis, elements), 2):
            expected = table.zero()
            for c, vc in zip(basis, elements):
                if L.c(a, b, c):
                    expected = expected + vc * L.c(a, b, c)
            residual = odd_bracket(va, vb) - expected
            for indices, value in read_components(residual, "y").items():
                if value:
                    bracket_witnesses.append(Witness(
                        relation="[v_a,v_b] - c^c_ab v_c",
                        location=f"{a},{b}:{indices[0]}",
                        residual=print_polynomial(value),
                        residual_value=value,
                    ))
        invariance_witnesses = []
        for a, v in zip(basis, fields):
            for (i, j), value in poisson_vector_field_components(model, v, "varpi").items():
                if value:
                    invariance_witnesses.append(Witness(
                        relation="[v_a,varpi]",
                        location=f"{a}:{i},{j}",
                        residual=print_polynomial(value),
                        residual_value=value,
                    ))
        reports = [
            CheckReport.from_witnesses(
                "action bracket", bracket_witnesses, len(list(combinations(basis, 2)))
            ),
            CheckReport.from_witnesses(
                "action poisson", invariance_witnesses, len(basis)
            ),
        ]
    for report in reports:
        if not report.passed:
            logger.info(f"Action check '{report.name}' failed")
    return reports


def invariance_check(model: PoissonModel, action: ActionSpec, bivector: str = "pi") -> CheckReport:
    """[v_a, π] = 0: the bivector is invariant under the action's vector fields."""
    table = geometry_table(model.space)
    pi = bivector_element(table, model.bivector(bivector))
    witnesses = []
    fields = hamilton_vector_fields(model, action)
    for a, v in enumerate(fields):
        bracket = odd_bracket(vector_element(table, v), pi)
        for indices, value in read_components(bracket, "y").items():
            if value:
                witnesses.append(Witness(
                    relation=f"[v_a,{bivector}]",
                    location=f"{a}:{','.join(indices)}",
                    residual=print_polynomial(value),
                    residual_value=value,
                ))
    return CheckReport.from_witnesses(f"{bivector} invariance", witnesses, len(fields))


# ==============================================================================
# Affine Lie–Poisson Models
# ==============================================================================

def _cocycle_entry(space: VariableSpace, value: Union[Polynomial, RationalLike]) -> Polynomial:
    if hasattr(value, "ring"):
        entry = embed(value, space.ring)
    else:
        entry = space.constant(value)
    for c in space.coordinates:
        if partial_derivative(entry, c, space):
            raise AlgebraError(f"Cocycle entry {print_polynomial(entry)} depends on coordinate {c}")
    return entry


def build_kks_model(
    space: VariableSpace,
    structure: Mapping[tuple[str, str, str], RationalLike],
    cocycle: Mapping[tuple[str, str], Union[Polynomial, RationalLike]],
    title: str = "",
) -> PoissonModel:
    """
    ϖ^{ij} = c^{ij}_k x^k and ϑ^{ij} = a^{ij}.

    structure maps (i, j, k) to c^{ij}_k; both may be given on either
    ordered pair, and an inconsistent pair raises.
    """
    position = {c: n for n, c in enumerate(space.coordinates)}
    canonical: dict[tuple[str, str, str], object] = {}
    for (i, j, k), value in structure.items():
        value = to_rational(value)
        if i == j:
            if value:
                raise AlgebraError(f"Structure constant c^({i},{i})_{k} must vanish")
            continue
        if position[i] > position[j]:
            i, j, value = j, i, -value
        if (i, j, k) in canonical and canonical[(i, j, k)] != value:
            raise AlgebraError(f"Structure constants c^({i},{j})_{k} are not antisymmetric")
        canonical[(i, j, k)] = value
    linear: dict[tuple[str, str], Polynomial] = {}
    for (i, j, k), value in canonical.items():
        linear[(i, j)] = linear.get((i, j), space.zero()) + space.gen(k) * value
    theta = {pair: _cocycle_entry(space, value) for pair, value in cocycle.items()}
    return PoissonModel.from_components(space, linear, theta, title)


def kks_conditions(
    space: VariableSpace,
    structure: Mapping[tuple[str, str, str], RationalLike],
    cocycle: Mapping[tuple[str, str], Union[Polynomial, RationalLike]],
) -> tuple[dict, dict]:
    """
    Literal residuals of the Lie algebra Jacobi identity of c^{ij}_k and the
    cocycle condition of a^{ij}, keyed by index tuple; only nonzero entries.
    """
    coords = space.coordinates
    c: dict[tuple[str, str, str], object] = {}
    for (i, j, k), value in structure.items():
        value = to_rational(value)
        if i == j and value:
            raise AlgebraError(f"Structure constant c^({i},{i})_{k} must vanish")
        if c.get((i, j, k), value) != value:
            raise AlgebraError(f"Structure constants c^({i},{j})_{k} are not antisymmetric")
        c[(i, j, k)] = value
        c[(j, i, k)] = -value
    a: dict[tuple[str, str], Polynomial] = {}
    for (i, j), value in cocycle.items():
        entry = _cocycle_entry(space, value)
        if i == j and entry:
            raise AlgebraError(f"Cocycle entry a^({i},{i}) must vanish")
        if a.get((i, j), entry) != entry:
            raise AlgebraError(f"Cocycle entries a^({i},{j}) are not antisymmetric")
        a[(i, j)] = entry
        a[(j, i)] = -entry

    def cc(i, j, k):
        return c.get((i, j, k), QQ.zero)

    def aa(i, j):
        return a.get((i, j), space.zero())

    jacobi = {}
    cocycle_residuals = {}
    for i, j, k in combinations(coords, 3):
        for l in coords:
            value = QQ.zero
            for m in coords:
                value += cc(i, j, m) * cc(m, k, l) + cc(j, k, m) * cc(m, i, l) + cc(k, i, m) * cc(m, j, l)
            if value:
                jacobi[(i, j, k, l)] = value
        total = space.zero()
        for m in coords:
            total += aa(m, k) * cc(i, j, m) + aa(m, i) * cc(j, k, m) + aa(m, j) * cc(k, i, m)
        if total:
            cocycle_residuals[(i, j, k)] = total
    return jacobi, cocycle_residuals
