"""
tests/test_api_endpoints.py — Integration tests for FastAPI endpoints.

Uses FastAPI TestClient (synchronous httpx client under the hood). The
lifespan runs, so the gallery is parsed once before the first request.
"""

import pytest  # type: ignore
from fastapi.testclient import TestClient  # type: ignore

from app.api.main import app  # type: ignore
from app.api.routers import examples  # type: ignore
from app.services.model_loader import ModelFileError  # type: ignore

API = "/api/v1"

UNIT_SQUARE = "triangle 0 0 1 0 1 1\ntriangle 0 0 1 1 0 1\n"

INLINE_SO3 = """\
[model]
title = "inline so(3)"
dimension = "3"
coordinates = "x1, x2, x3"

[varpi]
x1.x2 = "x3"
x2.x3 = "x1"
x3.x1 = "x2"
"""


@pytest.fixture(scope="module")
def client():
    with TestClient(app, raise_server_exceptions=True) as c:
        yield c


# ---------------------------------------------------------------------------
# System and gallery
# ---------------------------------------------------------------------------

class TestHealthEndpoint:
    def test_health_returns_ok(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        data = resp.json()
        assert data["status"] == "ok"
        assert data["gallery_size"] == 11

    def test_root(self, client):
        assert client.get("/").json()["docs"] == "/docs"


class TestExamplesEndpoints:
    def test_list(self, client):
        resp = client.get(f"{API}/examples/")
        assert resp.status_code == 200
        entries = {e["name"]: e for e in resp.json()}
        assert entries["broken_jacobi.psm"]["negative_control"] is True
        assert entries["sklyanin.psm"]["parameters"] == ["a1", "a2", "a3"]

    def test_get_model_text(self, client):
        resp = client.get(f"{API}/examples/r2gravity")
        assert resp.status_code == 200
        assert resp.text.startswith("[model]")
        assert "[action]" in resp.text

    def test_unknown_example(self, client):
        assert client.get(f"{API}/examples/no_such_model").status_code == 404

    def test_files_outside_the_gallery_are_not_served(self, client):
        assert client.get(f"{API}/examples/requirements.txt").status_code == 404
        assert client.get(f"{API}/examples/..%2Fconfig.py").status_code == 404

    def test_unreadable_gallery_file_is_422(self, client, monkeypatch):
        def broken(name):
            raise ModelFileError(f"{name}: Line 3: expected key = \"value\"")

        monkeypatch.setattr(examples, "load_gallery_model", broken)
        resp = client.get(f"{API}/examples/r2gravity")
        assert resp.status_code == 422
        assert "Line 3" in resp.json()["detail"]


# ---------------------------------------------------------------------------
# Check suites
# ---------------------------------------------------------------------------

class TestChecksEndpoint:
    def test_structure_on_gallery_model(self, client):
        resp = client.post(f"{API}/checks/structure", json={"model_name": "r2gravity"})
        assert resp.status_code == 200
        data = resp.json()
        assert data["model"] == "r2gravity.psm"
        assert all(r["passed"] for r in data["reports"])

    def test_negative_control_is_a_200_with_witnesses(self, client):
        resp = client.post(f"{API}/checks/structure", json={"model_name": "broken_jacobi"})
        assert resp.status_code == 200
        failing = [r for r in resp.json()["reports"] if not r["passed"]]
        assert failing and all(r["witnesses"] for r in failing)

    def test_inline_model(self, client):
        resp = client.post(f"{API}/checks/structure", json={"model_text": INLINE_SO3})
        assert resp.status_code == 200
        assert resp.json()["model"] == "<request>"

    def test_inline_model_error(self, client):
        resp = client.post(f"{API}/checks/structure", json={"model_text": INLINE_SO3 + 'x1.x2 = "x4"\n'})
        assert resp.status_code == 422

    def test_unknown_check(self, client):
        resp = client.post(f"{API}/checks/nonsense", json={"model_name": "r2gravity"})
        assert resp.status_code == 404

    def test_unknown_model(self, client):
        resp = client.post(f"{API}/checks/structure", json={"model_name": "no_such_model"})
        assert resp.status_code == 404

    @pytest.mark.parametrize("name", ["/etc/passwd", "../config.py", "../../app/cli.py", str(__file__)])
    def test_model_name_is_a_gallery_name_only(self, client, name):
        resp = client.post(f"{API}/checks/structure", json={"model_name": name})
        assert resp.status_code == 404, f"{name} must not be read from disk"

    @pytest.mark.parametrize("body", [
        {},
        {"model_name": "r2gravity", "model_text": INLINE_SO3},
    ])
    def test_exactly_one_source(self, client, body):
        assert client.post(f"{API}/checks/structure", json=body).status_code == 422

    def test_unmet_precondition(self, client):
        resp = client.post(f"{API}/checks/cartan", json={"model_name": "broken_jacobi"})
        assert resp.status_code == 422
        assert "poisson varpi" in resp.json()["detail"]

    def test_precondition_bypass(self, client):
        resp = client.post(f"{API}/checks/cartan", json={"model_name": "broken_jacobi", "allow_invalid": True})
        assert resp.status_code == 200
        cartan = resp.json()["reports"][0]
        assert cartan["name"] == "cartan" and not cartan["passed"]

    def test_lagrangian_values(self, client):
        resp = client.post(f"{API}/checks/lagrangian", json={"model_name": "so3_casimir"})
        assert resp.status_code == 200
        assert set(resp.json()["values"]) == {"L", "Xi"}


# ---------------------------------------------------------------------------
# Casimir
# ---------------------------------------------------------------------------

class TestCasimirEndpoints:
    def test_verify(self, client):
        body = {"model_name": "so3_casimir", "expression": "x1^2 + x2^2 + x3^2", "bivector": "varpi"}
        resp = client.post(f"{API}/casimir/verify", json=body)
        assert resp.status_code == 200
        assert resp.json()["passed"] is True

    def test_verify_bad_expression(self, client):
        body = {"model_name": "so3_casimir", "expression": "x1 +"}
        assert client.post(f"{API}/casimir/verify", json=body).status_code == 422

    def test_search(self, client):
        body = {"model_name": "r2gravity", "max_degree": 3}
        resp = client.post(f"{API}/casimir/search", json=body)
        assert resp.status_code == 200
        assert resp.json()["dimension"] == 2

    def test_search_with_parameters(self, client):
        body = {"model_name": "sklyanin", "max_degree": 2, "parameter_values": {"a1": "1", "a2": "2", "a3": "1/2"}}
        resp = client.post(f"{API}/casimir/search", json=body)
        assert resp.status_code == 200
        assert resp.json()["parameter_values"] == {"a1": "1", "a2": "2", "a3": "1/2"}

    def test_search_unknown_parameter(self, client):
        body = {"model_name": "sklyanin", "parameter_values": {"b1": "1"}}
        assert client.post(f"{API}/casimir/search", json=body).status_code == 422

    def test_search_degree_bound(self, client):
        body = {"model_name": "r2gravity", "max_degree": 7}
        assert client.post(f"{API}/casimir/search", json=body).status_code == 422


# ---------------------------------------------------------------------------
# Worldsheet
# ---------------------------------------------------------------------------

class TestStokesEndpoint:
    def test_circulation_form(self, client):
        body = {"psi1": ["-1/2*z2", "1/2*z1"], "chain_text": UNIT_SQUARE}
        resp = client.post(f"{API}/worldsheet/stokes", json=body)
        assert resp.status_code == 200
        data = resp.json()
        assert data["volume_integral"] == "1"
        assert data["boundary_integral"] == "1"
        assert data["report"]["passed"] is True

    def test_malformed_chain(self, client):
        body = {"psi0": "z1", "chain_text": "triangle 0 0 1"}
        assert client.post(f"{API}/worldsheet/stokes", json=body).status_code == 422
