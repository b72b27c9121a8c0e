"""
app/schemas/models.py — Pydantic v2 typed schemas for reports, requests and responses.

These schemas enforce the contract at the CLI (--json) and HTTP boundaries.
Services build CheckReports directly; residual SuperPolynomials ride along
in an excluded field so tests can re-verify them without re-parsing text.
"""

from __future__ import annotations

from typing import Any, Optional
from pydantic import BaseModel, Field, model_validator  # type: ignore

from config import MAX_WITNESSES_PER_REPORT  # type: ignore


# ==============================================================================
# Check Reports
# ==============================================================================

class Witness(BaseModel):
    """One failing instance of an identity."""
    relation: str = Field(description="Relation instance, e.g. '[s,s]' or '[l(t1),j(t2)]'")
    location: str = Field(description="Generator, index tuple or basis pair the residual belongs to")
    residual: str = Field(description="Nonzero residual printed in the input grammar")
    residual_value: Optional[Any] = Field(default=None, exclude=True, repr=False)


class CheckReport(BaseModel):
    """Structured outcome of a named identity check."""
    name: str = Field(description="Check name, e.g. 'cartan' or 'casimir'")
    passed: bool
    checked: int = Field(default=0, description="Number of relation instances evaluated")
    witnesses: list[Witness] = Field(default_factory=list)
    witness_count: int = Field(default=0, description="Total failures before truncation")
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _fail_needs_witness(self) -> "CheckReport":
        if not self.passed and not self.witnesses:
            raise ValueError(f"Check '{self.name}' failed without a witness")
        if self.passed and self.witnesses:
            raise ValueError(f"Check '{self.name}' passed but carries witnesses")
        return self

    @classmethod
    def from_witnesses(
        cls,
        name: str,
        witnesses: list[Witness],
        checked: int,
        notes: Optional[list[str]] = None,
    ) -> "CheckReport":
        return cls(
            name=name,
            passed=not witnesses,
            checked=checked,
            witnesses=witnesses[:MAX_WITNESSES_PER_REPORT],
            witness_count=len(witnesses),
            notes=notes or [],
        )

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


class CommandResult(BaseModel):
    """Everything one CLI command or HTTP check produced."""
    command: str
    model: Optional[str] = None
    reports: list[CheckReport] = Field(default_factory=list)
    values: dict[str, str] = Field(
        default_factory=dict, description="Named printed results (elements, bases, integrals)"
    )

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


# ==============================================================================
# Casimir Schemas
# ==============================================================================

class CasimirSearchResult(BaseModel):
    """Basis of the Casimir space up to a total degree."""
    bivector: str
    max_degree: int
    dimension: int
    basis: list[str] = Field(description="Basis polynomials in the input grammar")
    parameter_values: dict[str, str] = Field(default_factory=dict)


# ==============================================================================
# Gallery Schemas
# ==============================================================================

class GalleryEntry(BaseModel):
    """A bundled model file."""
    name: str = Field(description="File name, e.g. 'r2gravity.psm'")
    title: str = Field(default="", description="Human-readable title from the file")
    negative_control: bool = Field(default=False)
    dimension: int
    parameters: list[str] = Field(default_factory=list)


# ==============================================================================
# Request Schemas
# ==============================================================================

class ModelSource(BaseModel):
    """A model given by gallery name or as inline model-file text."""
    model_name: Optional[str] = Field(default=None, description="Bundled gallery file name")
    model_text: Optional[str] = Field(default=None, description="Inline model file")
    allow_invalid: bool = Field(default=False, description="Bypass context preconditions")

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "ModelSource":
        if (self.model_name is None) == (self.model_text is None):
            raise ValueError("Provide exactly one of model_name or model_text")
        return self


class CasimirVerifyRequest(ModelSource):
    expression: str = Field(description="Candidate Casimir function")
    bivector: str = Field(default="pi", pattern="^(varpi|theta|pi)$")


class CasimirSearchRequest(ModelSource):
    max_degree: int = Field(default=2, ge=0, le=6)
    bivector: str = Field(default="pi", pattern="^(varpi|theta|pi)$")
    parameter_values: dict[str, str] = Field(default_factory=dict)


class StokesRequest(BaseModel):
    """A superfield triple and a superchain given as chain-file text."""
    psi0: str = Field(default="0")
    psi1: tuple[str, str] = Field(default=("0", "0"))
    psi2: str = Field(default="0")
    chain_text: str = Field(description="Chain file contents")


class StokesResponse(BaseModel):
    volume_integral: str = Field(description="Integral of dΨ over C")
    boundary_integral: str = Field(description="Integral of Ψ over ∂C")
    report: CheckReport
