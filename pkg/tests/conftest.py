"""
tests/conftest.py — Shared pytest fixtures for the verification engine.

Gallery models are parsed once per session; operation contexts are the
expensive part, so they are session-scoped as well.
"""

from pathlib import Path

import pytest  # type: ignore

# Ensure project root is on path
import sys
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------

@pytest.fixture
def space3():
    from app.services.exact_algebra import VariableSpace  # type: ignore
    return VariableSpace(("x1", "x2", "x3"))


@pytest.fixture
def parametric_space():
    from app.services.exact_algebra import VariableSpace  # type: ignore
    return VariableSpace(("x1", "x2"), ("a",))


# ---------------------------------------------------------------------------
# Gallery models
# ---------------------------------------------------------------------------

def _gallery(name: str):
    from app.services.gallery import load_gallery_model  # type: ignore
    return load_gallery_model(name)


@pytest.fixture(scope="session")
def r2gravity():
    return _gallery("r2gravity")


@pytest.fixture(scope="session")
def so3_casimir():
    return _gallery("so3_casimir")


@pytest.fixture(scope="session")
def sklyanin():
    return _gallery("sklyanin")


@pytest.fixture(scope="session")
def broken_jacobi():
    return _gallery("broken_jacobi")


# ---------------------------------------------------------------------------
# Operation contexts
# ---------------------------------------------------------------------------

def _context(loaded, allow_invalid: bool = False):
    from app.services.cartan_bv import build_operation_context  # type: ignore
    return build_operation_context(loaded.model, loaded.lie, loaded.action, allow_invalid=allow_invalid)


@pytest.fixture(scope="session")
def r2gravity_ctx(r2gravity):
    return _context(r2gravity)


@pytest.fixture(scope="session")
def so3_ctx(so3_casimir):
    return _context(so3_casimir)


@pytest.fixture(scope="session")
def sklyanin_ctx(sklyanin):
    return _context(sklyanin)


@pytest.fixture(scope="session")
def broken_jacobi_ctx(broken_jacobi):
    return _context(broken_jacobi, allow_invalid=True)


# ---------------------------------------------------------------------------
# Report helpers
# ---------------------------------------------------------------------------

@pytest.fixture
def failing_relations():
    """Set of relation names carried by a report's witnesses."""
    def _relations(report):
        return {w.relation for w in report.witnesses}
    return _relations
