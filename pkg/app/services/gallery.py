"""
app/services/gallery.py — The bundled example models.

Gallery files live in config.MODELS_DIR. Negative controls are ordinary model
files flagged with `negative_control = "true"`; each one is built to fail
exactly one family of checks.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Union

from config import MODEL_FILE_SUFFIX, MODELS_DIR  # type: ignore
from app.schemas.models import GalleryEntry  # type: ignore
from app.services.model_loader import ModelFile, ModelFileError, export_model, load_model_file  # type: ignore

logger = logging.getLogger(__name__)


def resolve_gallery_path(name: str) -> Path:
    """A bare gallery file name (suffix optional) inside MODELS_DIR, nothing else."""
    if not name or name != Path(name).name or any(sep in name for sep in ("/", "\\")) or ".." in name:
        raise FileNotFoundError(f"No gallery entry '{name}'")
    candidate = MODELS_DIR / name
    if candidate.suffix != MODEL_FILE_SUFFIX:
        candidate = candidate.with_name(candidate.name + MODEL_FILE_SUFFIX)
    if candidate.resolve().parent != MODELS_DIR.resolve() or not candidate.is_file():
        raise FileNotFoundError(f"No gallery entry '{candidate.name}'")
    return candidate


def resolve_model_path(name: Union[str, Path]) -> Path:
    """A path as given if it exists, otherwise a gallery file name. Command line only."""
    path = Path(name)
    if path.exists():
        return path
    try:
        return resolve_gallery_path(path.name)
    except FileNotFoundError:
        raise FileNotFoundError(f"No model file '{name}' and no gallery entry '{path.name}'") from None


@lru_cache(maxsize=32)
def load_gallery_model(name: str) -> ModelFile:
    return load_model_file(resolve_gallery_path(name))


def list_gallery() -> list[GalleryEntry]:
    entries = []
    for path in sorted(MODELS_DIR.glob(f"*{MODEL_FILE_SUFFIX}")):
        try:
            loaded = load_gallery_model(path.name)
        except (ModelFileError, ValueError) as exc:
            logger.error(f"Skipping unreadable gallery file {path.name}: {exc}")
            continue
        entries.append(GalleryEntry(
            name=path.name,
            title=loaded.header.title,
            negative_control=loaded.header.negative_control,
            dimension=loaded.header.dimension,
            parameters=list(loaded.header.parameters),
        ))
    logger.info(f"Gallery holds {len(entries)} model(s)")
    return entries


def export_gallery(output_dir: Union[str, Path]) -> list[Path]:
    """Write every gallery model, re-exported from its parsed form, into output_dir."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in list_gallery():
        target = output_dir / entry.name
        target.write_text(export_model(load_gallery_model(entry.name)), encoding="utf-8")
        written.append(target)
    return written
