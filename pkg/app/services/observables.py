"""
app/services/observables.py — Observable conditions for multivectors and forms.

A multivector β lives in the (x, y) subalgebra and a form σ in the (x, X̃)
subalgebra of an operation context. Each check first evaluates the
conditions that define the class (Hamilton invariance, closedness under q or
k·d_M) and then the identities those conditions are supposed to imply, so a
failing condition and a failing consequence both surface as witnesses.
"""

import logging
from typing import Mapping, Union

from app.schemas.models import CheckReport, Witness  # type: ignore
from app.services.cartan_bv import OperationContext  # type: ignore
from app.services.exact_algebra import AlgebraError, Polynomial  # type: ignore
from app.services.poisson_geometry import (  # type: ignore
    FormField,
    Multivector,
    bivector_element,
    form_differential,
    form_field,
    interior_product,
    multivector,
    odd_bracket,
    vector_element,
)
from app.services.supergraded import SuperPolynomial, apply_derivation, format_superpolynomial  # type: ignore

logger = logging.getLogger(__name__)

Observable = Union[Multivector, FormField]


def observable_from_components(
    ctx: OperationContext,
    components: Mapping[tuple[str, ...], Polynomial],
    form: bool = False,
) -> Observable:
    """Build β = Σ β^{I} y_I or σ = Σ σ_I X̃^I over the context's generator table."""
    unknown = {c for indices in components for c in indices} - set(ctx.space.coordinates)
    if unknown:
        raise AlgebraError(f"Unknown coordinates in observable indices: {sorted(unknown)}")
    if form:
        return form_field(ctx.table, components)
    return multivector(ctx.table, components)


def _require_context_table(ctx: OperationContext, O: Observable) -> None:
    if O.table is not ctx.table:
        raise AlgebraError("Observable was built over a different generator table")
    if not ctx.action.is_hamilton:
        raise AlgebraError("Observable checks need a Hamilton action")


def _witness(relation: str, residual: SuperPolynomial) -> list[Witness]:
    if not residual:
        return []
    return [Witness(
        relation=relation,
        location="O",
        residual=format_superpolynomial(residual),
        residual_value=residual,
    )]


def _hamilton_invariance(ctx: OperationContext, beta: SuperPolynomial) -> list[Witness]:
    witnesses = []
    for t, h in zip(ctx.basis, ctx.action.hamiltonians):
        witnesses += _witness(f"[h({t}),beta]", odd_bracket(ctx.lift(h), beta))
    return witnesses


# ==============================================================================
# Equivariant Classes
# ==============================================================================

def equivariant_class_check(ctx: OperationContext, O: Observable) -> CheckReport:
    """
    Multivector β: [h_a,β] = 0 and qβ = 0, then j(t_a)β = 0, l(t_a)β = 0, sβ = dβ.
    Form σ: k·d_Mσ = 0, then j(t_a)σ = 0, l(t_a)σ = d j_M(v_a)σ, sσ = d(σ − hσ).
    """
    _require_context_table(ctx, O)
    witnesses: list[Witness] = []
    checked = 0
    if isinstance(O, Multivector):
        beta = O.value
        witnesses += _hamilton_invariance(ctx, beta)
        witnesses += _witness("q beta", apply_derivation(ctx.derivation("q"), beta))
        for t in ctx.basis:
            witnesses += _witness(f"j({t}) beta", apply_derivation(ctx.j(t), beta))
            witnesses += _witness(f"l({t}) beta", apply_derivation(ctx.l(t), beta))
        witnesses += _witness("s beta - d beta", apply_derivation(ctx.s, beta) - apply_derivation(ctx.d, beta))
        checked = 3 * len(ctx.basis) + 2
        name = "multivector class"
    else:
        sigma = O.value
        k_d_sigma = apply_derivation(ctx.derivation("k"), form_differential(O).value)
        witnesses += _witness("k d sigma", k_d_sigma)
        for t, v in zip(ctx.basis, ctx.vector_fields):
            field = Multivector(vector_element(ctx.table, v))
            contracted = interior_product(field, O).value
            witnesses += _witness(f"j({t}) sigma", apply_derivation(ctx.j(t), sigma))
            witnesses += _witness(
                f"l({t}) sigma - d j(v) sigma",
                apply_derivation(ctx.l(t), sigma) - apply_derivation(ctx.d, contracted),
            )
        h_sigma = apply_derivation(ctx.derivation("h"), sigma)
        witnesses += _witness(
            "s sigma - d(sigma - h sigma)",
            apply_derivation(ctx.s, sigma) - apply_derivation(ctx.d, sigma - h_sigma),
        )
        checked = 2 * len(ctx.basis) + 2
        name = "form class"
    report = CheckReport.from_witnesses(name, witnesses, checked)
    logger.info(f"{name}: {report.verdict}")
    return report


# ==============================================================================
# BV Observables
# ==============================================================================

def bv_observable_check(ctx: OperationContext, O: Observable) -> CheckReport:
    """
    Multivector β: [h_a,β] = 0 and [π,β] = 0, plus the exact decomposition
    w_πβ = dβ − [π,β] + [Φ_Γ,β].
    Form σ: k_π·d_Mσ = 0, plus the exact decomposition
    w_πσ = d(σ − k_πσ) + k_π·d_Mσ.
    """
    _require_context_table(ctx, O)
    witnesses: list[Witness] = []
    if isinstance(O, Multivector):
        beta = O.value
        pi = bivector_element(ctx.table, ctx.model.pi)
        pi_beta = odd_bracket(pi, beta)
        witnesses += _hamilton_invariance(ctx, beta)
        witnesses += _witness("q_pi beta", pi_beta)
        decomposition = apply_derivation(ctx.d, beta) - pi_beta + odd_bracket(ctx.phi_gamma(), beta)
        witnesses += _witness("w beta - decomposition", apply_derivation(ctx.w, beta) - decomposition)
        checked = len(ctx.basis) + 2
        name = "multivector observable"
    else:
        sigma = O.value
        k_pi = ctx.derivation("k_pi")
        k_d_sigma = apply_derivation(k_pi, form_differential(O).value)
        witnesses += _witness("k_pi d sigma", k_d_sigma)
        decomposition = apply_derivation(ctx.d, sigma - apply_derivation(k_pi, sigma)) + k_d_sigma
        witnesses += _witness("w sigma - decomposition", apply_derivation(ctx.w, sigma) - decomposition)
        checked = 2
        name = "form observable"
    report = CheckReport.from_witnesses(name, witnesses, checked)
    logger.info(f"{name}: {report.verdict}")
    return report
