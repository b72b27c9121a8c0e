"""
config.py — Central configuration for the Poisson sigma model verification engine.

All tunable parameters, paths, and naming conventions live here.
Services read their defaults from here instead of hardcoding them.
"""

import os
from pathlib import Path

from dotenv import load_dotenv  # type: ignore

load_dotenv()

# ==============================================================================
# Base Paths
# ==============================================================================

BASE_DIR = Path(__file__).resolve().parent
DATA_DIR = BASE_DIR / "data"
MODELS_DIR = DATA_DIR / "models"
CHAINS_DIR = DATA_DIR / "chains"
CONFIGS_DIR = DATA_DIR / "configs"

MODEL_FILE_SUFFIX = ".psm"
CHAIN_FILE_SUFFIX = ".chain"
CONFIG_FILE_SUFFIX = ".cfg"

# ==============================================================================
# Generator Naming
# The superalgebra lives over one sympy PolyRing, so every generator needs a
# symbol name. Templates are filled with a coordinate name ({c}) or a Lie
# algebra basis name ({t}). Coordinate and parameter names may not collide
# with the expanded names.
# ==============================================================================

GENERATOR_NAME_TEMPLATES = {
    "x": "{c}",              # degree 0, the coordinate itself
    "Xt": "X_{c}",           # X̃^i, degree 1
    "y": "y_{c}",            # y_i, degree 1
    "Yt": "Y_{c}",           # Ỹ_i, degree 2
    "gamma": "gamma_{t}",    # γ^a, degree 1
    "Gamma": "Gamma_{t}",    # Γ^a, degree 2
    "Xf": "Xf_{c}",          # fundamental X^i, degree 1
    "Yf": "Yf_{c}",          # fundamental Y_i, degree 2
    "Xs": "Xs_{c}",          # shifted X*^i, degree 1
    "Ys": "Ys_{c}",          # shifted Y*_i, degree 2
}

GENERATOR_DEGREES = {
    "x": 0, "Xt": 1, "y": 1, "Yt": 2, "gamma": 1, "Gamma": 2,
    "Xf": 1, "Yf": 2, "Xs": 1, "Ys": 2,
}

# ==============================================================================
# Checks & Search Defaults
# ==============================================================================

DEFAULT_CASIMIR_MAX_DEGREE = 2
DEFAULT_BIVECTOR = "pi"                  # varpi | theta | pi
BIVECTOR_CHOICES = ("varpi", "theta", "pi")
MAX_WITNESSES_PER_REPORT = int(os.getenv("MAX_WITNESSES_PER_REPORT", "25"))

# ==============================================================================
# Worldsheet
# ==============================================================================

WORLDSHEET_COORDINATES = ("z1", "z2")

# ==============================================================================
# Property Corpora (random models, superfields, chains)
# ==============================================================================

RANDOM_SEED = int(os.getenv("RANDOM_SEED", "20240611"))
RANDOM_MAX_DEGREE = 4
RANDOM_COEFFICIENT_RANGE = (-5, 5)       # numerators drawn uniformly, inclusive
RANDOM_DENOMINATORS = (1, 2, 3, 4)
STOKES_CORPUS_SIZE = 100
INTERTWINING_CORPUS_SIZE = 50
TWO_DIM_CORPUS_SIZE = 50

# ==============================================================================
# API Configuration
# ==============================================================================

API_HOST = os.getenv("API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("PORT", os.getenv("API_PORT", "8000")))
API_VERSION = "1.0.0"

# ==============================================================================
# Logging
# ==============================================================================

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"
