"""
tests/test_cli.py — Command-line surface: exit codes, text and JSON reports.
"""

import io
import json

import pytest  # type: ignore

from config import MODELS_DIR  # type: ignore
from app.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, run_command  # type: ignore


def _run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out=out)
    return code, out.getvalue()


# ---------------------------------------------------------------------------
# Check suites
# ---------------------------------------------------------------------------

class TestSuiteCommands:
    def test_structure_check_passes(self):
        code, text = _run("check", "r2gravity")
        assert code == EXIT_PASS
        assert text.startswith("== check r2gravity.psm ==")
        assert "FAIL" not in text
        assert "PASS  lie algebra" in text

    def test_negative_control_fails(self):
        code, text = _run("check", "broken_liealg")
        assert code == EXIT_FAIL
        assert "jacobi at (t1,t2,t3) -> t3: 1" in text

    def test_cartan_needs_valid_model(self):
        code, text = _run("cartan", "broken_jacobi")
        assert code == EXIT_ERROR
        assert text == "", "Errors go to the log, not to the report stream"

    def test_cartan_bypass_reports_failure(self):
        code, text = _run("cartan", "broken_jacobi", "--allow-invalid")
        assert code == EXIT_FAIL
        assert "[s,s]" in text

    def test_lagrangian_prints_elements(self):
        code, text = _run("lagrangian", "so3_casimir")
        assert code == EXIT_PASS
        assert "\nL = " in text and "\nXi = " in text

    def test_obstruction_on_bad_action(self):
        code, text = _run("obstruction", "r2gravity_bad_action", "--allow-invalid")
        assert code == EXIT_FAIL
        assert "PASS  obstruction formula" in text

    def test_json_report(self):
        code, text = _run("check", "incompatible_theta", "--json")
        document = json.loads(text)
        assert code == EXIT_FAIL
        assert document["passed"] is False
        assert document["model"] == "incompatible_theta.psm"
        assert all("residual_value" not in w for r in document["reports"] for w in r["witnesses"])

    def test_unknown_model(self):
        code, _ = _run("check", "no_such_model")
        assert code == EXIT_ERROR

    def test_model_file_path(self):
        code, text = _run("check", str(MODELS_DIR / "r2gravity.psm"))
        assert code == EXIT_PASS
        assert "r2gravity.psm" in text



# ---------------------------------------------------------------------------
# Casimir and observables
# ---------------------------------------------------------------------------

class TestCasimirCommands:
    def test_verify(self):
        code, text = _run("casimir", "verify", "so3_casimir", "--expr", "x1^2 + x2^2 + x3^2", "--bivector", "varpi")
        assert code == EXIT_PASS
        assert "f = x1^2 + x2^2 + x3^2" in text

    def test_verify_failure(self):
        code, _ = _run("casimir", "verify", "so3_casimir", "--expr", "x1", "--bivector", "varpi")
        assert code == EXIT_FAIL

    def test_bad_expression(self):
        code, _ = _run("casimir", "verify", "so3_casimir", "--expr", "x1 +")
        assert code == EXIT_ERROR

    def test_search(self):
        code, text = _run("casimir", "search", "r2gravity", "--max-degree", "3", "--json")
        values = json.loads(text)["values"]
        assert code == EXIT_PASS
        assert values["dimension"] == "2"
        assert values["basis[1]"] == "-4/3*x3^3 + 2*x1^2 + 2*x2^2 + x3"

    def test_search_rejects_unknown_parameter(self):
        code, _ = _run("casimir", "search", "sklyanin", "--param", "b1=1")
        assert code == EXIT_ERROR


class TestObservableCommand:
    def test_varpi_is_an_observable(self):
        code, _ = _run(
            "observable", "so3_casimir",
            "--component", "x1.x2=x3", "--component", "x2.x3=x1", "--component", "x1.x3=-x2",
        )
        assert code == EXIT_PASS

    def test_coordinate_form_fails(self):
        code, text = _run("observable", "so3_casimir", "--form", "--component", "=x1")
        assert code == EXIT_FAIL
        assert "FAIL  form class" in text

    def test_components_are_required(self):
        code, _ = _run("observable", "so3_casimir")
        assert code == EXIT_ERROR


# ---------------------------------------------------------------------------
# Worldsheet, gallery and flat families
# ---------------------------------------------------------------------------

class TestWorldsheetCommands:
    def test_stokes(self):
        code, text = _run("worldsheet", "stokes", "--chain", "unit_square", "--psi1", "z1*z2, z1^2")
        assert code == EXIT_PASS
        assert "PASS  stokes" in text

    def test_action(self):
        code, text = _run(
            "worldsheet", "action", "r2gravity", "--config", "r2gravity_sample", "--chain", "unit_square"
        )
        assert code == EXIT_PASS
        assert "action = 1/2" in text

    def test_pair(self):
        code, text = _run(
            "worldsheet", "pair", "r2gravity",
            "--config", "r2gravity_sample", "--chain", "triangle_loop", "--form", "--component", "=x1",
        )
        assert code == EXIT_PASS
        assert "pairing = 1/3" in text

    def test_unknown_chain(self):
        code, _ = _run("worldsheet", "stokes", "--chain", "no_such_chain")
        assert code == EXIT_ERROR

    def test_pair_with_ghost_components(self):
        code, text = _run(
            "worldsheet", "pair", "r2gravity",
            "--config", "r2gravity_ghosts", "--chain", "triangle_loop", "--form", "--component", "=x1",
        )
        assert code == EXIT_PASS
        assert "pairing = 1/3" in text
        assert "pairing[x1:psi1_1] = -1/2" in text

    def test_action_with_ghost_components(self):
        code, text = _run(
            "worldsheet", "action", "r2gravity", "--config", "r2gravity_ghosts", "--chain", "unit_square"
        )
        assert code == EXIT_PASS
        assert "action = 1/2" in text, "odd constants do not touch the constant-free part"



class TestExamplesCommands:
    def test_list_marks_negative_controls(self):
        code, text = _run("examples", "list")
        assert code == EXIT_PASS
        assert "broken_jacobi.psm = " in text
        assert text.count("[negative control]") == 5

    def test_export(self, tmp_path):
        code, _ = _run("examples", "export", "--output", str(tmp_path))
        assert code == EXIT_PASS
        assert (tmp_path / "r2gravity.psm").exists()


class TestFlatCommand:
    @pytest.mark.parametrize("expr, expected", [
        ("x1^2 + x2^2", EXIT_PASS),
        ("phi", EXIT_FAIL),
    ])
    def test_r2s1(self, expr, expected):
        code, _ = _run("flat", "r2s1", "--p", "x1", "--q", "x2", "--expr", expr)
        assert code == expected

    def test_structure_only(self):
        code, text = _run("flat", "r2s1", "--p", "x1*x2", "--q", "1")
        assert code == EXIT_PASS
        assert "P = x1*x2" in text
