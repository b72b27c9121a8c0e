"""
app/api/routers/casimir.py — Casimir verification and search endpoints.
"""

import logging

from fastapi import APIRouter  # type: ignore

from app.api.dependencies import load_source, unprocessable  # type: ignore
from app.schemas.models import (  # type: ignore
    CasimirSearchRequest,
    CasimirSearchResult,
    CasimirVerifyRequest,
    CheckReport,
)
from app.services.casimir_service import casimir_search_result  # type: ignore
from app.services.expression_parser import parse_expression, parse_rational  # type: ignore
from app.services.poisson_geometry import verify_casimir  # type: ignore

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/verify", response_model=CheckReport)
def verify(payload: CasimirVerifyRequest):
    """PASS iff the expression is annihilated by the chosen bivector."""
    loaded = load_source(payload)
    try:
        f = parse_expression(payload.expression, loaded.space)
    except ValueError as exc:
        raise unprocessable(exc, "Casimir verify")
    return verify_casimir(loaded.model, f, payload.bivector)


@router.post("/search", response_model=CasimirSearchResult)
def search(payload: CasimirSearchRequest):
    """Canonical basis of the Casimir space up to max_degree."""
    loaded = load_source(payload)
    try:
        unknown = [name for name in payload.parameter_values if name not in loaded.space.parameters]
        if unknown:
            raise ValueError(f"Unknown parameter(s): {unknown}")
        values = {name: parse_rational(value) for name, value in payload.parameter_values.items()}
        result = casimir_search_result(loaded.model, payload.bivector, payload.max_degree, values)
    except ValueError as exc:
        raise unprocessable(exc, "Casimir search")
    logger.info(f"Casimir search on {loaded.source}: dimension {result.dimension}")
    return result
