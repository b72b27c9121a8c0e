"""
app/api/routers/examples.py — Gallery listing and model export endpoints.
"""

import logging

from fastapi import APIRouter, HTTPException, status  # type: ignore
from fastapi.responses import PlainTextResponse  # type: ignore

from app.api.dependencies import unprocessable  # type: ignore
from app.schemas.models import GalleryEntry  # type: ignore
from app.services.gallery import list_gallery, load_gallery_model  # type: ignore
from app.services.model_loader import export_model  # type: ignore

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/", response_model=list[GalleryEntry])
def list_examples():
    """All bundled model files, negative controls included."""
    return list_gallery()


@router.get("/{name}", response_class=PlainTextResponse)
def get_example(name: str):
    """One gallery model, re-exported in model-file format."""
    try:
        loaded = load_gallery_model(name)
    except FileNotFoundError as exc:
        logger.error(f"Gallery lookup failed: {exc}")
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc))
    except ValueError as exc:
        raise unprocessable(exc, "Gallery export")
    return export_model(loaded)
