"""
app/services/check_suites.py — Named report suites shared by the CLI and the HTTP API.

A suite takes a loaded model file, builds whatever it needs (an operation
context for everything past the structure checks) and returns one
CommandResult with its reports in a fixed order.
"""

import logging
from typing import Callable

from app.schemas.models import CommandResult  # type: ignore
from app.services.cartan_bv import (  # type: ignore
    OperationContext,
    auxiliary_relations_check,
    build_operation_context,
    bv_nilpotency_check,
    cartan_check,
    degenerate_action_check,
    displayed_obstruction,
    field_equations,
    lagrangian_class_check,
    lagrangian_element,
    obstruction_check,
    shift_consistency_check,
    xi_element,
)
from app.services.model_loader import ModelFile  # type: ignore
from app.services.poisson_geometry import model_structure_check  # type: ignore
from app.services.supergraded import format_superpolynomial  # type: ignore
from app.services.symmetry import verify_action, verify_lie_algebra  # type: ignore

logger = logging.getLogger(__name__)


def _context(loaded: ModelFile, allow_invalid: bool) -> OperationContext:
    return build_operation_context(loaded.model, loaded.lie, loaded.action, allow_invalid=allow_invalid)


def structure_suite(loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    """Lie algebra, action, ϖ Poisson, π Poisson, compatibility. Needs no context."""
    reports = [
        verify_lie_algebra(loaded.lie),
        *verify_action(loaded.model, loaded.lie, loaded.action),
        *model_structure_check(loaded.model),
    ]
    return CommandResult(command="check", model=loaded.source, reports=reports)


def cartan_suite(loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    ctx = _context(loaded, allow_invalid)
    reports = [
        cartan_check(ctx),
        auxiliary_relations_check(ctx),
        bv_nilpotency_check(ctx),
        shift_consistency_check(ctx),
    ]
    theta_zero = not any(p for row in loaded.model.theta for p in row)
    if theta_zero and loaded.action.is_hamilton:
        reports.append(degenerate_action_check(ctx))
    return CommandResult(command="cartan", model=loaded.source, reports=reports)


def lagrangian_suite(loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    ctx = _context(loaded, allow_invalid)
    values = {
        "L": format_superpolynomial(lagrangian_element(ctx)),
        "Xi": format_superpolynomial(xi_element(ctx)),
    }
    return CommandResult(
        command="lagrangian", model=loaded.source, reports=[lagrangian_class_check(ctx)], values=values
    )


def obstruction_suite(loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    ctx = _context(loaded, allow_invalid)
    first, second = field_equations(ctx)
    values = {}
    for c, e1, e2, shown in zip(ctx.space.coordinates, first, second, displayed_obstruction(ctx)):
        values[f"E1[{c}]"] = format_superpolynomial(e1)
        values[f"E2[{c}]"] = format_superpolynomial(e2)
        values[f"obstruction[{c}]"] = format_superpolynomial(shown)
    return CommandResult(
        command="obstruction", model=loaded.source, reports=obstruction_check(ctx), values=values
    )


def shift_suite(loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    ctx = _context(loaded, allow_invalid)
    return CommandResult(command="shift", model=loaded.source, reports=[shift_consistency_check(ctx)])


SUITES: dict[str, Callable[[ModelFile, bool], CommandResult]] = {
    "structure": structure_suite,
    "cartan": cartan_suite,
    "lagrangian": lagrangian_suite,
    "obstruction": obstruction_suite,
    "shift": shift_suite,
}


def run_suite(name: str, loaded: ModelFile, allow_invalid: bool = False) -> CommandResult:
    if name not in SUITES:
        raise ValueError(f"Unknown check suite '{name}'; choose from {', '.join(SUITES)}")
    logger.info(f"Running '{name}' suite on {loaded.source}")
    return SUITES[name](loaded, allow_invalid)
