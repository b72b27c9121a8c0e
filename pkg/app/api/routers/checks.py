"""
app/api/routers/checks.py — Run a named check suite on a gallery or inline model.
"""

import logging
from typing import Callable

from fastapi import APIRouter, Depends, HTTPException  # type: ignore

from app.api.dependencies import get_suite, load_source, unprocessable  # type: ignore
from app.schemas.models import CommandResult, ModelSource  # type: ignore
from app.services.model_loader import ModelFile  # type: ignore

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/{check}", response_model=CommandResult)
def run_check(
    source: ModelSource,
    suite: Callable[[ModelFile, bool], CommandResult] = Depends(get_suite),
):
    """
    Run one suite: structure, cartan, lagrangian, obstruction or shift.

    A failing identity is a 200 response whose reports carry witnesses;
    only unloadable models and unmet context preconditions are errors.
    """
    loaded = load_source(source)
    try:
        return suite(loaded, source.allow_invalid)
    except HTTPException:
        raise
    except ValueError as exc:
        raise unprocessable(exc, "Check")
