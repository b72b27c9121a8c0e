"""
app/api/routers/worldsheet.py — Exact Stokes check for a superfield on a superchain.
"""

import logging

from fastapi import APIRouter  # type: ignore

from app.api.dependencies import unprocessable  # type: ignore
from app.schemas.models import StokesRequest, StokesResponse  # type: ignore
from app.services.worldsheet import (  # type: ignore
    DeRhamSuperfield,
    boundary,
    integrate,
    parse_chain,
    stokes_check,
    superfield_d,
)

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/stokes", response_model=StokesResponse)
def stokes(payload: StokesRequest):
    try:
        psi = DeRhamSuperfield.build(payload.psi0, payload.psi1, payload.psi2)
        chain = parse_chain(payload.chain_text)
    except ValueError as exc:
        raise unprocessable(exc, "Stokes")
    return StokesResponse(
        volume_integral=str(integrate(superfield_d(psi), chain)),
        boundary_integral=str(integrate(psi, boundary(chain))),
        report=stokes_check(psi, chain),
    )
