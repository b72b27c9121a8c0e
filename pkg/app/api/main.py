"""
app/api/main.py — FastAPI application entry point.

Startup sequence:
1. Configure logging
2. Parse every gallery model once (warms the gallery cache)
3. Register all API routers

Run with:
    uvicorn app.api.main:app --reload --host 127.0.0.1 --port 8000
"""

import logging
import sys
from contextlib import asynccontextmanager
from pathlib import Path

# Ensure project root is on sys.path when running from any directory
sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from fastapi import FastAPI  # type: ignore

from config import API_HOST, API_PORT, API_VERSION, LOG_DATEFMT, LOG_FORMAT, LOG_LEVEL  # type: ignore
from app.services.gallery import list_gallery  # type: ignore
from app.api.routers import casimir, checks, examples, worldsheet  # type: ignore

logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, datefmt=LOG_DATEFMT)
logger = logging.getLogger(__name__)

API_PREFIX = "/api/v1"


# ==============================================================================
# Lifespan — Startup / Shutdown
# ==============================================================================

@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("=== Poisson Sigma Model Verifier — Startup ===")
    try:
        entries = list_gallery()
        app.state.gallery_size = len(entries)
    except OSError as e:
        logger.error(f"Gallery unavailable: {e}")
        app.state.gallery_size = 0
    logger.info(f"Serving at http://{API_HOST}:{API_PORT}")
    yield
    logger.info("Shutdown complete.")


# ==============================================================================
# FastAPI App
# ==============================================================================

app = FastAPI(
    title="Poisson Sigma Model Verifier",
    description=(
        "Exact symbolic checks of the equivariant and BV structure of "
        "Poisson sigma models with compatible Poisson bivectors."
    ),
    version=API_VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

# ==============================================================================
# Routers
# ==============================================================================

app.include_router(examples.router,   prefix=f"{API_PREFIX}/examples",   tags=["Gallery"])
app.include_router(checks.router,     prefix=f"{API_PREFIX}/checks",     tags=["Checks"])
app.include_router(casimir.router,    prefix=f"{API_PREFIX}/casimir",    tags=["Casimir"])
app.include_router(worldsheet.router, prefix=f"{API_PREFIX}/worldsheet", tags=["Worldsheet"])


# ==============================================================================
# Health Check
# ==============================================================================

@app.get("/health", tags=["System"])
def health_check():
    return {
        "status": "ok",
        "service": "Poisson Sigma Model Verifier",
        "version": API_VERSION,
        "gallery_size": getattr(app.state, "gallery_size", 0),
    }


@app.get("/", tags=["System"])
def root():
    return {
        "message": "Poisson Sigma Model Verifier",
        "docs": "/docs",
        "health": "/health",
    }
