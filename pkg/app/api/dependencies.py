"""
app/api/dependencies.py — Shared FastAPI dependencies.

Resolves a request's model source (gallery name or inline text) into a
validated ModelFile and maps loader failures onto HTTP errors.
"""

import logging
from typing import Callable

from fastapi import HTTPException, status  # type: ignore

from app.schemas.models import CommandResult, ModelSource  # type: ignore
from app.services.check_suites import SUITES  # type: ignore
from app.services.gallery import load_gallery_model  # type: ignore
from app.services.model_loader import ModelFile, parse_model  # type: ignore

logger = logging.getLogger(__name__)


def load_source(source: ModelSource) -> ModelFile:
    """Load the model named or inlined by a request body; 404 for an unknown name, 422 for a bad file."""
    try:
        if source.model_name is not None:
            return load_gallery_model(source.model_name)
        return parse_model(source.model_text, "<request>")
    except FileNotFoundError as exc:
        logger.error(f"Unknown model: {exc}")
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc))
    except ValueError as exc:
        logger.error(f"Invalid model: {exc}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))


def unprocessable(exc: ValueError, what: str) -> HTTPException:
    logger.error(f"{what} failed: {exc}")
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))


def get_suite(check: str) -> Callable[[ModelFile, bool], CommandResult]:
    """Path dependency: the named check suite, 404 if there is none."""
    if check not in SUITES:
        logger.error(f"Unknown check suite '{check}'")
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Unknown check '{check}'; choose from {', '.join(SUITES)}",
        )
    return SUITES[check]
