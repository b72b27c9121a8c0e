"""
app/services/model_loader.py — Model file loading and export.

A model file is line-oriented and sectioned:

    [model]     title, dimension, coordinates, parameters, negative_control
    [varpi]     xi.xj = "expr"          (unspecified pairs are 0)
    [theta]     xi.xj = "expr"
    [liealg]    basis = "t1, t2"; c.ta.tb.tc = "rational"   (c^c_{ab})
    [action]    kind = "hamilton" | "poisson"; ta = "expr" or "v1, ..., vn"

`#` starts a comment. Every expression is parsed over the declared
coordinates and parameters, so errors carry a line and a column.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator  # type: ignore

from app.services.exact_algebra import (  # type: ignore
    AlgebraError,
    VariableSpace,
    format_rational,
    print_polynomial,
)
from app.services.expression_parser import ExpressionError, ModelFileError, parse_expression, parse_rational  # type: ignore
from app.services.poisson_geometry import PoissonModel  # type: ignore
from app.services.symmetry import HAMILTON, POISSON, ActionSpec, LieAlgebra  # type: ignore

logger = logging.getLogger(__name__)

SECTIONS = ("model", "varpi", "theta", "liealg", "action")
SECTION_PATTERN = re.compile(r"^\[(?P<name>[A-Za-z_]+)\]$")
ENTRY_PATTERN = re.compile(r'^(?P<key>[A-Za-z0-9_.]+)\s*=\s*"(?P<value>[^"]*)"$')
COMMENT_PATTERN = re.compile(r"\s*#.*$")


class ModelHeader(BaseModel):
    """The [model] section."""
    title: str = Field(default="", description="Human-readable title")
    dimension: int = Field(ge=1, description="Number of chart coordinates")
    coordinates: list[str] = Field(description="Ordered coordinate names")
    parameters: list[str] = Field(default_factory=list, description="Ordered scalar parameter names")
    negative_control: bool = Field(default=False, description="Gallery file that must fail a check")

    @field_validator("coordinates", "parameters", mode="before")
    @classmethod
    def _split_names(cls, value):
        if isinstance(value, str):
            return [name.strip() for name in value.split(",") if name.strip()]
        return value


@dataclass(frozen=True)
class ModelFile:
    """Everything a model file declares, fully validated."""
    header: ModelHeader
    model: PoissonModel
    lie: LieAlgebra
    action: ActionSpec
    source: str = ""

    @property
    def space(self) -> VariableSpace:
        return self.model.space


@dataclass
class _Entry:
    key: str
    value: str
    line: int


@dataclass
class _RawFile:
    sections: dict[str, list[_Entry]] = field(default_factory=lambda: {s: [] for s in SECTIONS})


def _read_sections(text: str, source: str) -> _RawFile:
    raw = _RawFile()
    current: Optional[str] = None
    for number, line in enumerate(text.splitlines(), start=1):
        line = COMMENT_PATTERN.sub("", line).strip()
        if not line:
            continue
        header = SECTION_PATTERN.match(line)
        if header:
            current = header.group("name")
            if current not in SECTIONS:
                raise ModelFileError(f"{source}:{number}: unknown section [{current}]")
            continue
        entry = ENTRY_PATTERN.match(line)
        if not entry:
            raise ModelFileError(f'{source}:{number}: expected key = "value", got \'{line}\'')
        if current is None:
            raise ModelFileError(f"{source}:{number}: entry before any section")
        raw.sections[current].append(_Entry(entry.group("key"), entry.group("value"), number))
    return raw


def _parse(entry: _Entry, space: VariableSpace):
    try:
        return parse_expression(entry.value, space)
    except ExpressionError as exc:
        raise exc.at_line(entry.line) from None


def _header(raw: _RawFile, source: str) -> ModelHeader:
    values = {e.key: e.value for e in raw.sections["model"]}
    try:
        header = ModelHeader(**values)
    except ValidationError as exc:
        raise ModelFileError(f"{source}: invalid [model] section: {exc.errors()[0]['msg']}") from exc
    if len(header.coordinates) != header.dimension:
        raise ModelFileError(
            f"{source}: dimension {header.dimension} but {len(header.coordinates)} coordinates declared"
        )
    return header


def _bivector(raw: _RawFile, name: str, space: VariableSpace, source: str) -> dict:
    components = {}
    for entry in raw.sections[name]:
        pair = tuple(entry.key.split("."))
        if len(pair) != 2:
            raise ModelFileError(f"{source}:{entry.line}: [{name}] keys are 'xi.xj', got '{entry.key}'")
        unknown = [c for c in pair if c not in space.coordinates]
        if unknown:
            raise ModelFileError(f"{source}:{entry.line}: unknown coordinate {unknown[0]}")
        if pair in components or pair[::-1] in components:
            raise ModelFileError(f"{source}:{entry.line}: pair {entry.key} given twice")
        components[pair] = _parse(entry, space)
    return components


def _lie_algebra(raw: _RawFile, source: str) -> LieAlgebra:
    basis: tuple[str, ...] = ()
    constants = {}
    for entry in raw.sections["liealg"]:
        if entry.key == "basis":
            basis = tuple(t.strip() for t in entry.value.split(",") if t.strip())
            continue
        parts = entry.key.split(".")
        if len(parts) != 4 or parts[0] != "c":
            raise ModelFileError(f"{source}:{entry.line}: [liealg] keys are 'basis' or 'c.ta.tb.tc'")
        try:
            constants[tuple(parts[1:])] = parse_rational(entry.value)
        except ExpressionError as exc:
            raise exc.at_line(entry.line) from None
    try:
        return LieAlgebra(basis, constants)
    except AlgebraError as exc:
        raise ModelFileError(f"{source}: {exc}") from exc


def _action(raw: _RawFile, lie: LieAlgebra, space: VariableSpace, source: str) -> ActionSpec:
    entries = {e.key: e for e in raw.sections["action"]}
    kind = entries.pop("kind").value if "kind" in entries else HAMILTON
    if kind not in (HAMILTON, POISSON):
        raise ModelFileError(f"{source}: action kind must be '{HAMILTON}' or '{POISSON}'")
    unknown = [k for k in entries if k not in lie.basis]
    if unknown:
        raise ModelFileError(f"{source}:{entries[unknown[0]].line}: '{unknown[0]}' is not a basis element")
    missing = [t for t in lie.basis if t not in entries]
    if missing:
        raise ModelFileError(f"{source}: no action entry for basis element(s) {missing}")
    if kind == HAMILTON:
        return ActionSpec.hamilton([_parse(entries[t], space) for t in lie.basis])
    fields = []
    for t in lie.basis:
        entry = entries[t]
        parts = [p.strip() for p in entry.value.split(",")]
        if len(parts) != space.dimension:
            raise ModelFileError(
                f"{source}:{entry.line}: vector field {t} has {len(parts)} components, expected {space.dimension}"
            )
        fields.append([_parse(_Entry(t, p, entry.line), space) for p in parts])
    return ActionSpec.poisson(fields)


def parse_model(text: str, source: str = "<text>") -> ModelFile:
    """Parse and validate model-file text."""
    raw = _read_sections(text, source)
    header = _header(raw, source)
    try:
        space = VariableSpace(tuple(header.coordinates), tuple(header.parameters))
        varpi = _bivector(raw, "varpi", space, source)
        theta = _bivector(raw, "theta", space, source)
        model = PoissonModel.from_components(space, varpi, theta, header.title)
    except AlgebraError as exc:
        raise ModelFileError(f"{source}: {exc}") from exc
    lie = _lie_algebra(raw, source)
    action = _action(raw, lie, space, source)
    logger.info(
        f"Loaded model '{header.title or source}': dimension {space.dimension}, "
        f"{len(space.parameters)} parameter(s), Lie algebra of dimension {lie.dimension}"
    )
    return ModelFile(header, model, lie, action, source)


def load_model_file(path: Union[str, Path]) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        logger.error(f"Cannot read model file {path}: {exc}")
        raise
    return parse_model(text, path.name)


def load_model(path: Union[str, Path]) -> tuple[PoissonModel, LieAlgebra, ActionSpec]:
    loaded = load_model_file(path)
    return loaded.model, loaded.lie, loaded.action


# ==============================================================================
# Export
# ==============================================================================

def _format_bivector(model: PoissonModel, choice: str) -> list[str]:
    return [
        f'{a}.{b} = "{print_polynomial(value)}"'
        for (a, b), value in model.components(choice).items()
    ]


def export_model(loaded: ModelFile) -> str:
    """Write a ModelFile back in file format; parse_model(export_model(m)) reproduces m."""
    header = loaded.header
    model, lie, action = loaded.model, loaded.lie, loaded.action
    lines = ["[model]"]
    if header.title:
        lines.append(f'title = "{header.title}"')
    lines.append(f'dimension = "{header.dimension}"')
    lines.append(f'coordinates = "{", ".join(header.coordinates)}"')
    if header.parameters:
        lines.append(f'parameters = "{", ".join(header.parameters)}"')
    if header.negative_control:
        lines.append('negative_control = "true"')
    lines += ["", "[varpi]", *_format_bivector(model, "varpi")]
    lines += ["", "[theta]", *_format_bivector(model, "theta")]
    lines += ["", "[liealg]"]
    if lie.basis:
        lines.append(f'basis = "{", ".join(lie.basis)}"')
    for (a, b, c), value in sorted(lie.constants.items()):
        lines.append(f'c.{a}.{b}.{c} = "{format_rational(value)}"')
    lines += ["", "[action]", f'kind = "{action.kind}"']
    if action.is_hamilton:
        for t, h in zip(lie.basis, action.hamiltonians):
            lines.append(f'{t} = "{print_polynomial(h)}"')
    else:
        for t, v in zip(lie.basis, action.vector_fields):
            lines.append(f'{t} = "{", ".join(print_polynomial(p) for p in v)}"')
    return "\n".join(lines) + "\n"
