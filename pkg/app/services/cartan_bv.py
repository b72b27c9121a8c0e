"""
app/services/cartan_bv.py — Equivariant operation, BV derivation and their identity checks.

The operation context realizes the 𝔥-equivariant generator algebra

    x^i (0), X̃^i (1), y_i (1), Ỹ_i (2), γ^a (1), Γ^a (2)

with the derivations j(t_a), l(t_a) (degrees −1, 0), s, d, w_π, q (degree 1)
and k, k_π, h (degree 0). The Weil composites ω^i = γ^a v_a^i,
Ω^i = Γ^a v_a^i and Φ_Γ = Γ^a h_a are expanded in place; they are never
generators. Every identity is decided on generators, which is complete for
derivations of a finitely generated algebra.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from sympy.polys.domains import QQ  # type: ignore

from app.schemas.models import CheckReport, Witness  # type: ignore
from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    Polynomial,
    VariableSpace,
    partial_derivative,
)
from app.services.poisson_geometry import (  # type: ignore
    Bivector,
    PoissonModel,
    bivector_element,
    jacobiator,
    model_structure_check,
    odd_bracket,
)
from app.services.supergraded import (  # type: ignore
    Derivation,
    GeneratorTable,
    SuperPolynomial,
    apply_derivation,
    compare_derivations,
    derivation_commutator,
    derivation_linear_combination,
    format_superpolynomial,
    substitute_generators,
    zero_derivation,
)
from app.services.symmetry import (  # type: ignore
    ActionSpec,
    LieAlgebra,
    hamilton_vector_fields,
    verify_action,
    verify_lie_algebra,
)

logger = logging.getLogger(__name__)

Rules = dict[str, SuperPolynomial]


class PreconditionError(ValueError):
    """Raised when a context is built from data that fails its own checks."""


# ==============================================================================
# Rule Builders
# ==============================================================================

class _RuleKit:
    """Shorthand for writing generator rules over one table."""

    def __init__(self, table: GeneratorTable):
        self.table = table
        self.space: VariableSpace = table.space
        self.coords = table.space.coordinates

    def lift(self, p: Polynomial) -> SuperPolynomial:
        return self.table.lift(p)

    def g(self, role: str, index: str) -> SuperPolynomial:
        return self.table.role(role, index)

    def d(self, p: Polynomial, c: str) -> Polynomial:
        return partial_derivative(p, c, self.space)

    def zero(self) -> SuperPolynomial:
        return self.table.zero()


def _poisson_rules(kit: _RuleKit, matrix: Bivector, X: str, Y: str) -> dict[str, Rules]:
    """
    The bivector part shared by s (with ϖ, no Weil terms) and w_π (with π):

        x^i ↦ X^i + π^{ij}y_j
        X^i ↦ −π^{ij}Y_j − ∂_jπ^{ik}X^jy_k
        y_i ↦ Y_i + ½∂_iπ^{jk}y_jy_k
        Y_i ↦ −½∂_i∂_jπ^{kl}X^jy_ky_l + ∂_iπ^{jk}y_jY_k
    """
    coords = kit.coords
    n = len(coords)
    rules: Rules = {}
    for i, ci in enumerate(coords):
        sx = kit.g(X, ci)
        sX = kit.zero()
        sy = kit.g(Y, ci)
        sY = kit.zero()
        for j, cj in enumerate(coords):
            if matrix[i][j]:
                sx = sx + kit.lift(matrix[i][j]) * kit.g("y", cj)
                sX = sX - kit.lift(matrix[i][j]) * kit.g(Y, cj)
            for k, ck in enumerate(coords):
                dj_ik = kit.d(matrix[i][k], cj)
                if dj_ik:
                    sX = sX - kit.lift(dj_ik) * kit.g(X, cj) * kit.g("y", ck)
                di_jk = kit.d(matrix[j][k], ci)
                if di_jk:
                    sY = sY + kit.lift(di_jk) * kit.g("y", cj) * kit.g(Y, ck)
                    if j < k:
                        sy = sy + kit.lift(di_jk) * kit.g("y", cj) * kit.g("y", ck)
            for k, l in combinations(range(n), 2):
                second = kit.d(kit.d(matrix[k][l], ci), cj)
                if second:
                    sY = sY - kit.lift(second) * kit.g(X, cj) * kit.g("y", coords[k]) * kit.g("y", coords[l])
        rules[ci] = sx
        rules[kit.table.name_for(X, ci)] = sX
        rules[kit.table.name_for("y", ci)] = sy
        rules[kit.table.name_for(Y, ci)] = sY
    return rules


def _weil_shift_terms(
    kit: _RuleKit, fields: Sequence[Sequence[Polynomial]], basis: Sequence[str], X: str, Y: str
) -> Rules:
    """
    The ω_γ, Ω_Γ corrections of the equivariant s:

        x^i ↦ γ^b v_b^i
        X^i ↦ −Γ^b v_b^i + γ^b ∂_jv_b^i X^j
        y_i ↦ −γ^b ∂_iv_b^j y_j
        Y_i ↦ Γ^b ∂_iv_b^j y_j − γ^b ∂_iv_b^j Y_j − γ^b ∂_i∂_jv_b^k X^j y_k
    """
    coords = kit.coords
    rules: Rules = {}
    for i, ci in enumerate(coords):
        tx = tX = ty = tY = kit.zero()
        for t, v in zip(basis, fields):
            gamma, Gamma = kit.g("gamma", t), kit.g("Gamma", t)
            if v[i]:
                tx = tx + kit.lift(v[i]) * gamma
                tX = tX - kit.lift(v[i]) * Gamma
            for j, cj in enumerate(coords):
                dj_vi = kit.d(v[i], cj)
                if dj_vi:
                    tX = tX + kit.lift(dj_vi) * gamma * kit.g(X, cj)
                di_vj = kit.d(v[j], ci)
                if di_vj:
                    ty = ty - kit.lift(di_vj) * gamma * kit.g("y", cj)
                    tY = tY + kit.lift(di_vj) * Gamma * kit.g("y", cj)
                    tY = tY - kit.lift(di_vj) * gamma * kit.g(Y, cj)
                for k, ck in enumerate(coords):
                    second = kit.d(kit.d(v[k], ci), cj)
                    if second:
                        tY = tY - kit.lift(second) * gamma * kit.g(X, cj) * kit.g("y", ck)
        rules[ci] = tx
        rules[kit.table.name_for(X, ci)] = tX
        rules[kit.table.name_for("y", ci)] = ty
        rules[kit.table.name_for(Y, ci)] = tY
    return rules


def _lie_rules(kit: _RuleKit, v: Sequence[Polynomial], X: str, Y: str) -> Rules:
    """l along v: x ↦ v, X ↦ ∂_jv^i X^j, y ↦ −∂_iv^j y_j, Y ↦ −∂_iv^j Y_j − ∂_i∂_jv^k X^j y_k."""
    coords = kit.coords
    rules: Rules = {}
    for i, ci in enumerate(coords):
        lX = ly = lY = kit.zero()
        for j, cj in enumerate(coords):
            dj_vi = kit.d(v[i], cj)
            if dj_vi:
                lX = lX + kit.lift(dj_vi) * kit.g(X, cj)
            di_vj = kit.d(v[j], ci)
            if di_vj:
                ly = ly - kit.lift(di_vj) * kit.g("y", cj)
                lY = lY - kit.lift(di_vj) * kit.g(Y, cj)
            for k, ck in enumerate(coords):
                second = kit.d(kit.d(v[k], ci), cj)
                if second:
                    lY = lY - kit.lift(second) * kit.g(X, cj) * kit.g("y", ck)
        rules[ci] = kit.lift(v[i])
        rules[kit.table.name_for(X, ci)] = lX
        rules[kit.table.name_for("y", ci)] = ly
        rules[kit.table.name_for(Y, ci)] = lY
    return rules


def _contraction_rules(kit: _RuleKit, v: Sequence[Polynomial], X: str, Y: str) -> Rules:
    """j along v on the non-equivariant generators: X ↦ v, Y_i ↦ −∂_iv^j y_j."""
    rules: Rules = {}
    for i, ci in enumerate(kit.coords):
        jY = kit.zero()
        for j, cj in enumerate(kit.coords):
            di_vj = kit.d(v[j], ci)
            if di_vj:
                jY = jY - kit.lift(di_vj) * kit.g("y", cj)
        rules[kit.table.name_for(X, ci)] = kit.lift(v[i])
        rules[kit.table.name_for(Y, ci)] = jY
    return rules


def _weil_rules(kit: _RuleKit, lie: LieAlgebra) -> tuple[Rules, dict[str, Rules], dict[str, Rules]]:
    """s, j(t_a), l(t_a) on γ, Γ."""
    basis = lie.basis
    s_rules: Rules = {}
    for a in basis:
        sg = kit.g("Gamma", a)
        sG = kit.zero()
        for b in basis:
            for c in basis:
                coeff = lie.c(b, c, a)
                if coeff:
                    sg = sg - kit.g("gamma", b) * kit.g("gamma", c) * (coeff * QQ(1, 2))
                    sG = sG - kit.g("gamma", b) * kit.g("Gamma", c) * coeff
        s_rules[kit.table.name_for("gamma", a)] = sg
        s_rules[kit.table.name_for("Gamma", a)] = sG
    j_rules: dict[str, Rules] = {}
    l_rules: dict[str, Rules] = {}
    for a in basis:
        j_rules[a] = {kit.table.name_for("gamma", a): kit.table.one()}
        rules: Rules = {}
        for b in basis:
            lg = lG = kit.zero()
            for c in basis:
                coeff = lie.c(a, c, b)
                if coeff:
                    lg = lg - kit.g("gamma", c) * coeff
                    lG = lG - kit.g("Gamma", c) * coeff
            rules[kit.table.name_for("gamma", b)] = lg
            rules[kit.table.name_for("Gamma", b)] = lG
        l_rules[a] = rules
    return s_rules, j_rules, l_rules


def _merge(*parts: Rules) -> Rules:
    merged: Rules = {}
    for part in parts:
        for name, value in part.items():
            merged[name] = merged[name] + value if name in merged else value
    return merged


# ==============================================================================
# Operation Context
# ==============================================================================

@dataclass(frozen=True)
class OperationContext:
    model: PoissonModel
    lie: LieAlgebra
    action: ActionSpec
    table: GeneratorTable
    vector_fields: tuple[tuple[Polynomial, ...], ...]
    derivations: Mapping[str, Derivation] = field(default_factory=dict)
    allow_invalid: bool = False

    @property
    def space(self) -> VariableSpace:
        return self.model.space

    @property
    def basis(self) -> tuple[str, ...]:
        return self.lie.basis

    def derivation(self, name: str) -> Derivation:
        try:
            return self.derivations[name]
        except KeyError:
            raise AlgebraError(f"Context has no derivation '{name}'") from None

    def j(self, t: str) -> Derivation:
        return self.derivation(f"j({t})")

    def l(self, t: str) -> Derivation:
        return self.derivation(f"l({t})")

    @property
    def s(self) -> Derivation:
        return self.derivation("s")

    @property
    def d(self) -> Derivation:
        return self.derivation("d")

    @property
    def w(self) -> Derivation:
        return self.derivation("w")

    # --- elements -------------------------------------------------------------

    def lift(self, p: Polynomial) -> SuperPolynomial:
        return self.table.lift(p)

    def gen(self, role: str, index: str) -> SuperPolynomial:
        return self.table.role(role, index)

    def phi_gamma(self) -> SuperPolynomial:
        """Φ_Γ = Γ^a h_a."""
        self._require_hamilton("Φ_Γ")
        result = self.table.zero()
        for t, h in zip(self.basis, self.action.hamiltonians):
            result = result + self.gen("Gamma", t) * self.lift(h)
        return result

    def bivector(self, choice: str) -> SuperPolynomial:
        return bivector_element(self.table, self.model.bivector(choice))

    def _require_hamilton(self, what: str) -> None:
        if not self.action.is_hamilton:
            raise AlgebraError(f"{what} needs a Hamilton action")


def _context_derivations(
    table: GeneratorTable,
    model: PoissonModel,
    lie: LieAlgebra,
    action: ActionSpec,
    fields: Sequence[Sequence[Polynomial]],
) -> dict[str, Derivation]:
    kit = _RuleKit(table)
    space = model.space
    coords = space.coordinates
    weil_s, weil_j, weil_l = _weil_rules(kit, lie)

    s_rules = _merge(
        _poisson_rules(kit, model.varpi, "Xt", "Yt"),
        _weil_shift_terms(kit, fields, lie.basis, "Xt", "Yt"),
        weil_s,
    )
    derivations: dict[str, Derivation] = {"s": Derivation.from_rules(table, 1, s_rules, "s")}
    for t, v in zip(lie.basis, fields):
        derivations[f"j({t})"] = Derivation.from_rules(table, -1, weil_j[t], f"j({t})")
        derivations[f"l({t})"] = Derivation.from_rules(
            table, 0, _merge(_lie_rules(kit, v, "Xt", "Yt"), weil_l[t]), f"l({t})"
        )

    d_rules: Rules = {}
    for c in coords:
        d_rules[c] = kit.g("Xt", c)
        d_rules[table.name_for("y", c)] = kit.g("Yt", c)
    for t in lie.basis:
        d_rules[table.name_for("gamma", t)] = kit.g("Gamma", t)
    derivations["d"] = Derivation.from_rules(table, 1, d_rules, "d")

    w_rules = _poisson_rules(kit, model.pi, "Xt", "Yt")
    if action.is_hamilton:
        for c in coords:
            shift_y = kit.zero()
            shift_Y = kit.zero()
            for t, h in zip(lie.basis, action.hamiltonians):
                dh = kit.d(h, c)
                if dh:
                    shift_y = shift_y - kit.g("Gamma", t) * kit.lift(dh)
                for cj in coords:
                    second = kit.d(dh, cj)
                    if second:
                        shift_Y = shift_Y + kit.g("Gamma", t) * kit.lift(second) * kit.g("Xt", cj)
            w_rules = _merge(w_rules, {
                table.name_for("y", c): shift_y,
                table.name_for("Yt", c): shift_Y,
            })
    derivations["w"] = Derivation.from_rules(table, 1, w_rules, "w")

    for label, matrix in (("k", model.varpi), ("k_pi", model.pi)):
        rules: Rules = {}
        for i, ci in enumerate(coords):
            value = kit.zero()
            for j, cj in enumerate(coords):
                if matrix[i][j]:
                    value = value + kit.lift(matrix[i][j]) * kit.g("y", cj)
            rules[table.name_for("Xt", ci)] = value
        derivations[label] = Derivation.from_rules(table, 0, rules, label)

    if action.is_hamilton:
        rules = {}
        for i, ci in enumerate(coords):
            value = kit.zero()
            for j, cj in enumerate(coords):
                if not model.varpi[i][j]:
                    continue
                shifted = kit.g("y", cj)
                for t, h in zip(lie.basis, action.hamiltonians):
                    dh = kit.d(h, cj)
                    if dh:
                        shifted = shifted - kit.g("gamma", t) * kit.lift(dh)
                value = value + kit.lift(model.varpi[i][j]) * shifted
            rules[table.name_for("Xt", ci)] = value
        derivations["h"] = Derivation.from_rules(table, 0, rules, "h")

    # q = [ϖ, ·] on the (x, y) subalgebra
    varpi = bivector_element(table, model.varpi)
    q_rules: Rules = {}
    for c in coords:
        q_rules[c] = odd_bracket(varpi, kit.g("x", c))
        q_rules[table.name_for("y", c)] = odd_bracket(varpi, kit.g("y", c))
    derivations["q"] = Derivation.from_rules(table, 1, q_rules, "q")
    return derivations


def build_operation_context(
    model: PoissonModel,
    lie: LieAlgebra,
    action: ActionSpec,
    allow_invalid: bool = False,
) -> OperationContext:
    """
    Realize the 𝔥-equivariant operation for a model, Lie algebra and action.

    The Lie algebra, action and structure checks must pass unless
    allow_invalid is set; negative controls use the bypass.
    """
    reports = [verify_lie_algebra(lie), *verify_action(model, lie, action), *model_structure_check(model)]
    failed = [r.name for r in reports if not r.passed]
    if failed:
        if not allow_invalid:
            logger.error(f"Context preconditions failed: {failed}")
            raise PreconditionError(
                f"Context preconditions failed: {', '.join(failed)} (use --allow-invalid to bypass)"
            )
        logger.warning(f"Building context despite failed preconditions: {failed}")

    table = GeneratorTable.standard(model.space, lie.basis)
    fields = tuple(tuple(v) for v in hamilton_vector_fields(model, action))
    derivations = _context_derivations(table, model, lie, action, fields)
    logger.info(
        f"Built operation context: {len(table.generators)} generators, "
        f"{len(derivations)} derivations"
    )
    return OperationContext(model, lie, action, table, fields, derivations, allow_invalid)


# ==============================================================================
# Comparison Helpers
# ==============================================================================

def _witnesses_for(
    relation: str, actual: Derivation, expected: Derivation
) -> list[Witness]:
    return [
        Witness(
            relation=relation,
            location=name,
            residual=format_superpolynomial(residual),
            residual_value=residual,
        )
        for name, residual in compare_derivations(actual, expected)
    ]


def _element_witness(relation: str, location: str, residual: SuperPolynomial) -> list[Witness]:
    if not residual:
        return []
    return [Witness(
        relation=relation,
        location=location,
        residual=format_superpolynomial(residual),
        residual_value=residual,
    )]


def _structure_combination(
    ctx: OperationContext, a: str, b: str, maker: Callable[[str], Derivation], degree: int, label: str
) -> Derivation:
    return derivation_linear_combination(
        ctx.table, degree, [(ctx.lie.c(a, b, c), maker(c)) for c in ctx.basis], label
    )


def _log_report(report: CheckReport) -> CheckReport:
    if report.passed:
        logger.info(f"{report.name}: PASS ({report.checked} instances)")
    else:
        logger.info(f"{report.name}: FAIL ({report.witness_count} witness(es))")
    return report


# ==============================================================================
# Identity Checks
# ==============================================================================

def cartan_check(ctx: OperationContext) -> CheckReport:
    """
    [s,s] = 0, [s,j(a)] = l(a), [s,l(a)] = 0, [j(a),j(b)] = 0,
    [l(a),j(b)] = c^c_{ab} j(c), [l(a),l(b)] = c^c_{ab} l(c).
    """
    table = ctx.table
    zero1 = zero_derivation(table, 1)
    witnesses: list[Witness] = []
    relations = 0

    def check(relation: str, actual: Derivation, expected: Derivation) -> None:
        nonlocal relations
        relations += 1
        witnesses.extend(_witnesses_for(relation, actual, expected))

    check("[s,s]", derivation_commutator(ctx.s, ctx.s), zero_derivation(table, 2))
    for a in ctx.basis:
        check(f"[s,j({a})]", derivation_commutator(ctx.s, ctx.j(a)), ctx.l(a))
        check(f"[s,l({a})]", derivation_commutator(ctx.s, ctx.l(a)), zero1)
    for i, a in enumerate(ctx.basis):
        for b in ctx.basis[i:]:
            check(f"[j({a}),j({b})]", derivation_commutator(ctx.j(a), ctx.j(b)), zero_derivation(table, -2))
    for ia, a in enumerate(ctx.basis):
        for ib, b in enumerate(ctx.basis):
            check(
                f"[l({a}),j({b})]",
                derivation_commutator(ctx.l(a), ctx.j(b)),
                _structure_combination(ctx, a, b, ctx.j, -1, "c j"),
            )
            if ia <= ib:
                check(
                    f"[l({a}),l({b})]",
                    derivation_commutator(ctx.l(a), ctx.l(b)),
                    _structure_combination(ctx, a, b, ctx.l, 0, "c l"),
                )
    checked = relations * len(table.generators)
    return _log_report(CheckReport.from_witnesses("cartan", witnesses, checked))


def auxiliary_relations_check(ctx: OperationContext) -> CheckReport:
    """[d,·] = 0 against d, j, l, s and the five BV relations [w_π,·] = 0."""
    table = ctx.table
    witnesses: list[Witness] = []
    pairs: list[tuple[str, Derivation, Derivation]] = [("[d,d]", ctx.d, ctx.d), ("[d,s]", ctx.d, ctx.s)]
    for a in ctx.basis:
        pairs.append((f"[d,j({a})]", ctx.d, ctx.j(a)))
        pairs.append((f"[d,l({a})]", ctx.d, ctx.l(a)))
    pairs.append(("[w,w]", ctx.w, ctx.w))
    for a in ctx.basis:
        pairs.append((f"[w,j({a})]", ctx.w, ctx.j(a)))
        pairs.append((f"[w,l({a})]", ctx.w, ctx.l(a)))
    pairs.append(("[w,s]", ctx.w, ctx.s))
    pairs.append(("[w,d]", ctx.w, ctx.d))
    for relation, D1, D2 in pairs:
        commutator = derivation_commutator(D1, D2)
        witnesses.extend(_witnesses_for(relation, commutator, zero_derivation(table, commutator.degree)))
    checked = len(pairs) * len(table.generators)
    return _log_report(CheckReport.from_witnesses("auxiliary relations", witnesses, checked))


def bv_nilpotency_check(ctx: OperationContext) -> CheckReport:
    """[w_π, w_π] = 2 w_π² vanishes on generators."""
    commutator = derivation_commutator(ctx.w, ctx.w)
    witnesses = _witnesses_for("[w,w]", commutator, zero_derivation(ctx.table, 2))
    return _log_report(CheckReport.from_witnesses("bv nilpotency", witnesses, len(ctx.table.generators)))


def lagrangian_element(ctx: OperationContext) -> SuperPolynomial:
    """L_π = y_i X̃^i + ½π^{ij} y_i y_j − Φ_Γ."""
    ctx._require_hamilton("The Lagrangian")
    result = ctx.table.zero()
    for c in ctx.space.coordinates:
        result = result + ctx.gen("y", c) * ctx.gen("Xt", c)
    return result + ctx.bivector("pi") - ctx.phi_gamma()


def xi_element(ctx: OperationContext) -> SuperPolynomial:
    """Ξ = y_i X̃^i − Φ_Γ + ½π^{ij} y_i y_j − ½ϖ^{ij} y_i y_j."""
    ctx._require_hamilton("Ξ")
    result = ctx.table.zero()
    for c in ctx.space.coordinates:
        result = result + ctx.gen("y", c) * ctx.gen("Xt", c)
    return result - ctx.phi_gamma() + ctx.bivector("pi") - ctx.bivector("varpi")


def lagrangian_class_check(ctx: OperationContext) -> CheckReport:
    """j(t_a)L_π = 0, l(t_a)L_π = 0 and sL_π = dΞ."""
    L = lagrangian_element(ctx)
    witnesses: list[Witness] = []
    for a in ctx.basis:
        witnesses += _element_witness(f"j({a})L", "L", apply_derivation(ctx.j(a), L))
        witnesses += _element_witness(f"l({a})L", "L", apply_derivation(ctx.l(a), L))
    residual = apply_derivation(ctx.s, L) - apply_derivation(ctx.d, xi_element(ctx))
    witnesses += _element_witness("sL - dXi", "L", residual)
    return _log_report(
        CheckReport.from_witnesses("lagrangian class", witnesses, 2 * len(ctx.basis) + 1)
    )


def field_equations(ctx: OperationContext) -> tuple[list[SuperPolynomial], list[SuperPolynomial]]:
    """
    E1^i = X̃^i + π^{ij} y_j and E2_i = Ỹ_i + ½∂_iπ^{jk} y_j y_k − ∂_iΦ_Γ,
    the algebraic shadows of the superfield equations; dx ↦ X̃, dy ↦ Ỹ.
    """
    ctx._require_hamilton("The field equations")
    first = [ctx.w.on(c) for c in ctx.space.coordinates]
    second = [ctx.w.on(ctx.table.name_for("y", c)) for c in ctx.space.coordinates]
    return first, second


def _on_shell_substitution(ctx: OperationContext) -> dict[str, SuperPolynomial]:
    """X̃^i ↦ −π^{ij} y_j and Ỹ_i ↦ −½∂_iπ^{jk} y_j y_k + ∂_iΦ_Γ."""
    first, second = field_equations(ctx)
    subst = {}
    for c, e1, e2 in zip(ctx.space.coordinates, first, second):
        X = ctx.gen("Xt", c)
        Y = ctx.gen("Yt", c)
        subst[ctx.table.name_for("Xt", c)] = X - e1
        subst[ctx.table.name_for("Yt", c)] = Y - e2
    return subst


def integrability_obstruction(ctx: OperationContext) -> list[SuperPolynomial]:
    """d applied to E1^i, with the field equations substituted back in."""
    first, _ = field_equations(ctx)
    subst = _on_shell_substitution(ctx)
    return [substitute_generators(apply_derivation(ctx.d, e1), subst) for e1 in first]


def displayed_obstruction(ctx: OperationContext) -> list[SuperPolynomial]:
    """π^{ij}∂_jΦ_Γ − ½ J^{ijk} y_j y_k, with J the Jacobiator of π."""
    space = ctx.space
    coords = space.coordinates
    pi = ctx.model.pi
    J = jacobiator(pi, space)
    phi_terms = [
        sum(
            (ctx.gen("Gamma", t) * ctx.lift(partial_derivative(h, c, space)) for t, h in zip(ctx.basis, ctx.action.hamiltonians)),
            ctx.table.zero(),
        )
        for c in coords
    ]
    result = []
    for i, ci in enumerate(coords):
        value = ctx.table.zero()
        for j in range(len(coords)):
            if pi[i][j]:
                value = value + ctx.lift(pi[i][j]) * phi_terms[j]
        # −½ Σ_{j,k} J^{ijk} y_j y_k = −Σ_{j<k} J^{ijk} y_j y_k
        for j, k in combinations(range(len(coords)), 2):
            if i in (j, k):
                continue
            triple = sorted((i, j, k))
            sign = _permutation_sign((i, j, k), triple)
            component = J[tuple(coords[m] for m in triple)]
            if component:
                term = ctx.lift(component) * ctx.gen("y", coords[j]) * ctx.gen("y", coords[k])
                value = value - term if sign > 0 else value + term
        result.append(value)
    return result


def _permutation_sign(order: Sequence[int], sorted_order: Sequence[int]) -> int:
    positions = [sorted_order.index(v) for v in order]
    sign = 1
    for a, b in combinations(range(len(positions)), 2):
        if positions[a] > positions[b]:
            sign = -sign
    return sign


def obstruction_check(ctx: OperationContext) -> list[CheckReport]:
    """The obstruction equals its displayed form, and vanishes iff [π,π] = 0 and [π,h_a] = 0."""
    residuals = integrability_obstruction(ctx)
    displayed = displayed_obstruction(ctx)
    coords = ctx.space.coordinates
    formula_witnesses: list[Witness] = []
    vanishing_witnesses: list[Witness] = []
    for c, residual, expected in zip(coords, residuals, displayed):
        formula_witnesses += _element_witness("obstruction - displayed", c, residual - expected)
        vanishing_witnesses += _element_witness("obstruction", c, residual)
    return [
        _log_report(CheckReport.from_witnesses("obstruction formula", formula_witnesses, len(coords))),
        _log_report(CheckReport.from_witnesses("integrability", vanishing_witnesses, len(coords))),
    ]


def degenerate_action_check(ctx: OperationContext) -> CheckReport:
    """
    For π = ϖ with a ϖ-Casimir action: j(t_a) and l(t_a) vanish on the
    target generators, l(t_a) vanishes on γ, Γ when 𝔥 is abelian, and
    w_π agrees with s on every x^i.
    """
    table = ctx.table
    notes = []
    if any(p for row in ctx.model.theta for p in row):
        notes.append("theta is nonzero, so pi differs from varpi")
    target = [g.name for g in table if g.role in ("x", "Xt", "y", "Yt")]
    weil = [g.name for g in table if g.role in ("gamma", "Gamma")]
    witnesses: list[Witness] = []
    checked = 0
    for a in ctx.basis:
        for name in target:
            checked += 2
            witnesses += _element_witness(f"j({a})", name, ctx.j(a).on(name))
            witnesses += _element_witness(f"l({a})", name, ctx.l(a).on(name))
        if ctx.lie.is_abelian:
            for name in weil:
                checked += 1
                witnesses += _element_witness(f"l({a})", name, ctx.l(a).on(name))
    for c in ctx.space.coordinates:
        checked += 1
        witnesses += _element_witness("w - s", c, ctx.w.on(c) - ctx.s.on(c))
    return _log_report(CheckReport.from_witnesses("degenerate action", witnesses, checked, notes))


# ==============================================================================
# Shift Consistency
# ==============================================================================

SHIFT_ROLES = ("x", "Xf", "y", "Yf", "Xs", "Ys", "Xt", "Yt", "gamma", "Gamma")


def shift_consistency_check(ctx: OperationContext, varpi_shift_sign: int = -1) -> CheckReport:
    """
    Relate the three presentations of the operation by generator shifts.

    Fundamental (x, X, y, Y) against star (x, X*, y, Y*) under
    X* = X − ϖ^{ij}y_j, Y* = Y − ½∂_iϖ^{jk}y_jy_k; then star ⊗ Weil against
    the equivariant generators under X̃ = X* − ω, Ỹ = Y* + γ^b∂_iv_b^jy_j.
    Each derivation D must satisfy D'(φ(g)) = φ(D(g)) on every generator.
    varpi_shift_sign flips the ϖ term of the first shift for negative controls.
    """
    model, lie = ctx.model, ctx.lie
    table = GeneratorTable.standard(model.space, lie.basis, roles=SHIFT_ROLES)
    kit = _RuleKit(table)
    coords = model.space.coordinates
    fields = ctx.vector_fields
    weil_s, weil_j, weil_l = _weil_rules(kit, lie)

    # fundamental operation
    fund_s: Rules = {}
    for c in coords:
        fund_s[c] = kit.g("Xf", c)
        fund_s[table.name_for("y", c)] = kit.g("Yf", c)
    fundamental = {"s": Derivation.from_rules(table, 1, fund_s, "s_fund")}
    star = {"s": Derivation.from_rules(table, 1, _poisson_rules(kit, model.varpi, "Xs", "Ys"), "s_star")}
    star_weil = {"s": Derivation.from_rules(
        table, 1, _merge(_poisson_rules(kit, model.varpi, "Xs", "Ys"), weil_s), "s_star_weil"
    )}
    equivariant = {"s": Derivation.from_rules(table, 1, _merge(
        _poisson_rules(kit, model.varpi, "Xt", "Yt"),
        _weil_shift_terms(kit, fields, lie.basis, "Xt", "Yt"),
        weil_s,
    ), "s_eq")}
    for t, v in zip(lie.basis, fields):
        fundamental[f"j({t})"] = Derivation.from_rules(table, -1, _contraction_rules(kit, v, "Xf", "Yf"), f"j_fund({t})")
        fundamental[f"l({t})"] = Derivation.from_rules(table, 0, _lie_rules(kit, v, "Xf", "Yf"), f"l_fund({t})")
        star[f"j({t})"] = Derivation.from_rules(table, -1, _contraction_rules(kit, v, "Xs", "Ys"), f"j_star({t})")
        star[f"l({t})"] = Derivation.from_rules(table, 0, _lie_rules(kit, v, "Xs", "Ys"), f"l_star({t})")
        star_weil[f"j({t})"] = Derivation.from_rules(
            table, -1, _merge(_contraction_rules(kit, v, "Xs", "Ys"), weil_j[t]), f"j_sw({t})"
        )
        star_weil[f"l({t})"] = Derivation.from_rules(
            table, 0, _merge(_lie_rules(kit, v, "Xs", "Ys"), weil_l[t]), f"l_sw({t})"
        )
        equivariant[f"j({t})"] = Derivation.from_rules(table, -1, weil_j[t], f"j_eq({t})")
        equivariant[f"l({t})"] = Derivation.from_rules(
            table, 0, _merge(_lie_rules(kit, v, "Xt", "Yt"), weil_l[t]), f"l_eq({t})"
        )

    # X* ↦ X ∓ ϖ y, Y* ↦ Y − ½∂ϖ yy
    star_to_fund: Rules = {}
    y_shift = _poisson_rules(kit, model.varpi, "Xf", "Yf")
    for i, c in enumerate(coords):
        varpi_y = y_shift[c] - kit.g("Xf", c)
        half_dvarpi = y_shift[table.name_for("y", c)] - kit.g("Yf", c)
        star_to_fund[table.name_for("Xs", c)] = kit.g("Xf", c) + varpi_y * varpi_shift_sign
        star_to_fund[table.name_for("Ys", c)] = kit.g("Yf", c) - half_dvarpi

    # X̃ ↦ X* − ω, Ỹ ↦ Y* + γ^b ∂_iv_b^j y_j
    eq_to_star: Rules = {}
    shift_terms = _weil_shift_terms(kit, fields, lie.basis, "Xs", "Ys")
    for c in coords:
        eq_to_star[table.name_for("Xt", c)] = kit.g("Xs", c) - shift_terms[c]
        eq_to_star[table.name_for("Yt", c)] = kit.g("Ys", c) - shift_terms[table.name_for("y", c)]

    witnesses: list[Witness] = []
    checked = 0

    def compare(label: str, source: dict, target: dict, phi: Rules, generators: Iterable[str]) -> None:
        nonlocal checked
        for name, D in source.items():
            D_target = target[name]
            for g in generators:
                checked += 1
                lhs = apply_derivation(D_target, substitute_generators(table.generator(g), phi))
                rhs = substitute_generators(D.on(g), phi)
                witnesses.extend(_element_witness(f"{label} {name}", g, lhs - rhs))

    star_generators = [n for role in ("x", "Xs", "y", "Ys") for n in table.names(role)]
    eq_generators = [n for role in ("x", "Xt", "y", "Yt", "gamma", "Gamma") for n in table.names(role)]
    compare("fundamental/star", star, fundamental, star_to_fund, star_generators)
    compare("star/equivariant", equivariant, star_weil, eq_to_star, eq_generators)
    return _log_report(CheckReport.from_witnesses("shift consistency", witnesses, checked))
