"""
app/cli.py — Command-line surface of the verification engine.

Usage:
    python -m app.cli check r2gravity
    python -m app.cli cartan broken_jacobi --allow-invalid
    python -m app.cli casimir search r2gravity --max-degree 3 --json
    python -m app.cli worldsheet stokes --chain unit_square --psi1 "z2, z1*z2"

Exit codes: 0 when every report passes, 1 when at least one fails,
2 when a model, chain or expression cannot be loaded. Reports go to
stdout, logs to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from config import (  # type: ignore
    BIVECTOR_CHOICES,
    CHAIN_FILE_SUFFIX,
    CHAINS_DIR,
    CONFIG_FILE_SUFFIX,
    CONFIGS_DIR,
    DEFAULT_BIVECTOR,
    DEFAULT_CASIMIR_MAX_DEGREE,
    LOG_DATEFMT,
    LOG_FORMAT,
    LOG_LEVEL,
)
from app.schemas.models import CheckReport, CommandResult, Witness  # type: ignore
from app.services.cartan_bv import OperationContext, build_operation_context  # type: ignore
from app.services.casimir_service import casimir_search_result  # type: ignore
from app.services.check_suites import run_suite  # type: ignore
from app.services.exact_algebra import VariableSpace, print_polynomial  # type: ignore
from app.services.expression_parser import parse_expression, parse_rational  # type: ignore
from app.services.flat_families import r2s1_casimir_conditions, r2s1_model  # type: ignore
from app.services.gallery import export_gallery, list_gallery, resolve_model_path  # type: ignore
from app.services.model_loader import ModelFile, load_model_file  # type: ignore
from app.services.observables import (  # type: ignore
    bv_observable_check,
    equivariant_class_check,
    observable_from_components,
)
from app.services.poisson_geometry import model_structure_check, verify_casimir  # type: ignore
from app.services.report_service import report_service  # type: ignore
from app.services.supergraded import format_superpolynomial  # type: ignore
from app.services.worldsheet import (  # type: ignore
    DeRhamSuperfield,
    action_value,
    boundary,
    evaluate_configuration,
    ghost_integrals,
    integrate,
    load_chain,
    load_configuration,
    pair_observable,
    realized_lagrangian,
    stokes_check,
    superfield_d,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


# ==============================================================================
# Argument Helpers
# ==============================================================================

def _resolve_data_file(name: str, directory: Path, suffix: str) -> Path:
    """A path as given if it exists, otherwise a bundled file under directory."""
    path = Path(name)
    if path.exists():
        return path
    candidate = directory / path.name
    if candidate.suffix != suffix:
        candidate = candidate.with_name(candidate.name + suffix)
    if not candidate.exists():
        raise FileNotFoundError(f"No file '{name}' and no bundled '{candidate.name}'")
    return candidate


def _key_values(pairs: Sequence[str], flag: str) -> list[tuple[str, str]]:
    result = []
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"{flag} expects KEY=VALUE, got '{pair}'")
        result.append((key.strip(), value.strip()))
    return result


def _components(pairs: Sequence[str], space: VariableSpace) -> dict:
    """`x1.x2=expr` entries; an empty key is the degree-0 component."""
    components = {}
    for key, value in _key_values(pairs, "--component"):
        indices = tuple(k for k in key.split(".") if k)
        components[indices] = parse_expression(value, space)
    if not components:
        raise ValueError("At least one --component is required")
    return components


def _load(args) -> ModelFile:
    return load_model_file(resolve_model_path(args.model))


def _context(loaded: ModelFile, args) -> OperationContext:
    return build_operation_context(loaded.model, loaded.lie, loaded.action, allow_invalid=args.allow_invalid)


# ==============================================================================
# Command Handlers
# ==============================================================================

def _suite_command(suite: str):
    def handler(args) -> CommandResult:
        return run_suite(suite, _load(args), allow_invalid=args.allow_invalid)
    return handler


def _cmd_casimir(args) -> CommandResult:
    loaded = _load(args)
    if args.casimir_command == "verify":
        f = parse_expression(args.expr, loaded.space)
        report = verify_casimir(loaded.model, f, args.bivector)
        return CommandResult(
            command="casimir verify", model=loaded.source, reports=[report], values={"f": print_polynomial(f)}
        )
    parameters = {}
    for name, value in _key_values(args.param, "--param"):
        if name not in loaded.space.parameters:
            raise ValueError(f"Unknown parameter '{name}'")
        parameters[name] = parse_rational(value)
    result = casimir_search_result(loaded.model, args.bivector, args.max_degree, parameters)
    values = {"dimension": str(result.dimension)}
    for k, f in enumerate(result.basis):
        values[f"basis[{k}]"] = f
    return CommandResult(command="casimir search", model=loaded.source, values=values)


def _cmd_observable(args) -> CommandResult:
    loaded = _load(args)
    ctx = _context(loaded, args)
    O = observable_from_components(ctx, _components(args.component, loaded.space), form=args.form)
    reports = [equivariant_class_check(ctx, O), bv_observable_check(ctx, O)]
    return CommandResult(
        command="observable", model=loaded.source, reports=reports, values={"O": format_superpolynomial(O.value)}
    )


def _cmd_worldsheet(args) -> CommandResult:
    chain = load_chain(_resolve_data_file(args.chain, CHAINS_DIR, CHAIN_FILE_SUFFIX))
    if args.worldsheet_command == "stokes":
        psi1 = tuple(p.strip() for p in args.psi1.split(","))
        psi = DeRhamSuperfield.build(args.psi0, psi1, args.psi2)
        values = {
            "int dPsi": str(integrate(superfield_d(psi), chain)),
            "int_boundary Psi": str(integrate(psi, boundary(chain))),
        }
        return CommandResult(command="worldsheet stokes", reports=[stokes_check(psi, chain)], values=values)

    loaded = _load(args)
    ctx = _context(loaded, args)
    config = load_configuration(_resolve_data_file(args.config, CONFIGS_DIR, CONFIG_FILE_SUFFIX), ctx.table)
    if args.worldsheet_command == "action":
        value = action_value(ctx, config, chain)
        values = {"action": str(value)}
        if config.has_ghosts:
            ghosts = ghost_integrals(realized_lagrangian(ctx, config), chain)
            values.update({f"action[{key}]": str(v) for key, v in ghosts.items()})
        return CommandResult(command="worldsheet action", model=loaded.source, values=values)

    O = observable_from_components(ctx, _components(args.component, loaded.space), form=args.form)
    value = pair_observable(ctx, O.value, config, chain)
    values = {"O": format_superpolynomial(O.value), "pairing": str(value)}
    if config.has_ghosts:
        ghosts = ghost_integrals(evaluate_configuration(ctx, O.value, config), chain)
        values.update({f"pairing[{key}]": str(v) for key, v in ghosts.items()})
    return CommandResult(command="worldsheet pair", model=loaded.source, values=values)


def _cmd_examples(args) -> CommandResult:
    if args.examples_command == "export":
        written = export_gallery(args.output)
        return CommandResult(
            command="examples export", values={path.name: str(path) for path in written}
        )
    values = {}
    for entry in list_gallery():
        flag = " [negative control]" if entry.negative_control else ""
        values[entry.name] = f"{entry.title}{flag}"
    return CommandResult(command="examples list", values=values)


def _cmd_flat(args) -> CommandResult:
    space = VariableSpace(("x1", "x2", "phi"))
    P = parse_expression(args.p, space)
    Q = parse_expression(args.q, space)
    model = r2s1_model(space, P, Q)
    reports = model_structure_check(model)
    values = {"P": print_polynomial(P), "Q": print_polynomial(Q)}
    if args.expr:
        f = parse_expression(args.expr, space)
        values["f"] = print_polynomial(f)
        reports.append(verify_casimir(model, f, "pi"))
        conditions = r2s1_casimir_conditions(space, P, Q, f)
        witnesses = [
            Witness(relation="r2s1 casimir", location=str(k), residual=print_polynomial(value), residual_value=value)
            for k, value in enumerate(conditions)
            if value
        ]
        reports.append(CheckReport.from_witnesses("r2s1 casimir conditions", witnesses, len(conditions)))
    return CommandResult(command="flat r2s1", model=model.title, reports=reports, values=values)


# ==============================================================================
# Parser
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psm-verify",
        description="Exact verification of the equivariant structure of Poisson sigma models.",
    )
    parser.add_argument("--json", action="store_true", help="Print a machine-readable report")
    commands = parser.add_subparsers(dest="command", required=True)

    def model_command(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("model", help="Model file path or gallery name")
        sub.add_argument("--allow-invalid", action="store_true", help="Bypass context preconditions")
        sub.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sub.set_defaults(handler=handler)
        return sub

    model_command("check", _suite_command("structure"), "Structure checks: Lie algebra, action, Poisson and compatibility")
    model_command("cartan", _suite_command("cartan"), "Cartan relations, auxiliary relations and generator shifts")
    model_command("lagrangian", _suite_command("lagrangian"), "Print the Lagrangian and check its equivariant class")
    model_command("obstruction", _suite_command("obstruction"), "Integrability of the field equations")

    casimir = commands.add_parser("casimir", help="Verify or search Casimir functions")
    casimir_commands = casimir.add_subparsers(dest="casimir_command", required=True)
    verify = casimir_commands.add_parser("verify")
    verify.add_argument("model")
    verify.add_argument("--expr", required=True, help="Candidate Casimir function")
    search = casimir_commands.add_parser("search")
    search.add_argument("model")
    search.add_argument("--max-degree", type=int, default=DEFAULT_CASIMIR_MAX_DEGREE)
    search.add_argument("--param", action="append", default=[], help="Fix a parameter, NAME=VALUE")
    for sub in (verify, search):
        sub.add_argument("--bivector", choices=BIVECTOR_CHOICES, default=DEFAULT_BIVECTOR)
        sub.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    casimir.set_defaults(handler=_cmd_casimir)

    observable = model_command("observable", _cmd_observable, "Equivariant class and BV observable checks")
    observable.add_argument("--form", action="store_true", help="Components are form components")
    observable.add_argument("--component", action="append", default=[], help="KEY=EXPR, key like x1.x2")

    worldsheet = commands.add_parser("worldsheet", help="Superfields, superchains and integration")
    worldsheet_commands = worldsheet.add_subparsers(dest="worldsheet_command", required=True)
    stokes = worldsheet_commands.add_parser("stokes")
    stokes.add_argument("--chain", required=True)
    stokes.add_argument("--psi0", default="0")
    stokes.add_argument("--psi1", default="0, 0", help="Two comma-separated components")
    stokes.add_argument("--psi2", default="0")
    for name in ("action", "pair"):
        sub = worldsheet_commands.add_parser(name)
        sub.add_argument("model")
        sub.add_argument("--chain", required=True)
        sub.add_argument("--config", required=True)
        sub.add_argument("--allow-invalid", action="store_true")
        if name == "pair":
            sub.add_argument("--form", action="store_true")
            sub.add_argument("--component", action="append", default=[])
    for sub in worldsheet_commands.choices.values():
        sub.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    worldsheet.set_defaults(handler=_cmd_worldsheet)

    examples = commands.add_parser("examples", help="The bundled model gallery")
    examples_commands = examples.add_subparsers(dest="examples_command", required=True)
    examples_commands.add_parser("list")
    export = examples_commands.add_parser("export")
    export.add_argument("--output", required=True, help="Target directory")
    for sub in examples_commands.choices.values():
        sub.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    examples.set_defaults(handler=_cmd_examples)

    flat = commands.add_parser("flat", help="Flat-chart model families")
    flat_commands = flat.add_subparsers(dest="flat_command", required=True)
    r2s1 = flat_commands.add_parser("r2s1")
    r2s1.add_argument("--p", required=True, help="P(x1, x2)")
    r2s1.add_argument("--q", required=True, help="Q(x1, x2)")
    r2s1.add_argument("--expr", default=None, help="Candidate Casimir function")
    r2s1.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    flat.set_defaults(handler=_cmd_flat)
    return parser


def run_command(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Parse argv, run one command, print its report; returns the exit code."""
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        result = args.handler(args)
    except (ValueError, OSError) as exc:
        logger.error(f"{args.command}: {exc}")
        return EXIT_ERROR
    out.write(report_service.format_json(result) if args.json else report_service.format_text(result))
    return EXIT_PASS if result.passed else EXIT_FAIL


def main() -> None:
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, datefmt=LOG_DATEFMT, stream=sys.stderr)
    sys.exit(run_command())


if __name__ == "__main__":
    main()
