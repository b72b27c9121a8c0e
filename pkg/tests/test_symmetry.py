"""
tests/test_symmetry.py — Lie algebras, actions and affine Lie–Poisson models.
"""

import pytest  # type: ignore

from app.services.exact_algebra import AlgebraError  # type: ignore
from app.services.expression_parser import parse_expression  # type: ignore
from app.services.gallery import load_gallery_model  # type: ignore
from app.services.poisson_geometry import compatibility_check, hamilton_components, model_structure_check  # type: ignore
from app.services.symmetry import (  # type: ignore
    ActionSpec,
    LieAlgebra,
    build_kks_model,
    hamilton_vector_fields,
    invariance_check,
    kks_conditions,
    verify_action,
    verify_lie_algebra,
)

SO3_CONSTANTS = {
    ("t1", "t2", "t3"): 1, ("t2", "t1", "t3"): -1,
    ("t2", "t3", "t1"): 1, ("t3", "t2", "t1"): -1,
    ("t3", "t1", "t2"): 1, ("t1", "t3", "t2"): -1,
}
KKS_STRUCTURE = {("x0", "x1", "x2"): 1, ("x0", "x2", "x3"): 1}


# ---------------------------------------------------------------------------
# Lie algebras
# ---------------------------------------------------------------------------

class TestLieAlgebra:
    def test_so3_is_a_lie_algebra(self):
        report = verify_lie_algebra(LieAlgebra(("t1", "t2", "t3"), SO3_CONSTANTS))
        assert report.passed
        assert report.name == "lie algebra"

    def test_broken_jacobi_witness(self):
        loaded = load_gallery_model("broken_liealg")
        report = verify_lie_algebra(loaded.lie)
        assert not report.passed
        assert [(w.relation, w.location, w.residual) for w in report.witnesses] == [
            ("jacobi", "(t1,t2,t3) -> t3", "1")
        ]

    def test_antisymmetry_failure(self):
        report = verify_lie_algebra(LieAlgebra(("t1", "t2"), {("t1", "t2", "t1"): 1}))
        assert not report.passed
        assert report.witnesses[0].relation == "antisymmetry"
        assert report.witnesses[0].location == "c^t1_(t1,t2)"

    def test_zero_constants_are_dropped(self):
        L = LieAlgebra(("t1", "t2"), {("t1", "t2", "t1"): 0})
        assert L.is_abelian
        assert L.dimension == 2

    def test_unknown_basis_name_rejected(self):
        with pytest.raises(AlgebraError):
            LieAlgebra(("t1",), {("t1", "t2", "t1"): 1})

    def test_duplicate_basis_rejected(self):
        with pytest.raises(AlgebraError):
            LieAlgebra(("t1", "t1"))


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

class TestHamiltonAction:
    def test_r2gravity_action_passes(self, r2gravity):
        reports = verify_action(r2gravity.model, r2gravity.lie, r2gravity.action)
        assert [r.name for r in reports] == ["action bracket", "action casimir"]
        assert all(r.passed for r in reports)

    def test_sklyanin_action_passes(self, sklyanin):
        reports = verify_action(sklyanin.model, sklyanin.lie, sklyanin.action)
        assert all(r.passed for r in reports), "f1 and f2 Poisson-commute and are pi-Casimirs"

    def test_non_casimir_hamiltonian(self):
        loaded = load_gallery_model("r2gravity_bad_action")
        bracket, casimir = verify_action(loaded.model, loaded.lie, loaded.action)
        assert bracket.passed
        assert not casimir.passed
        assert {w.location for w in casimir.witnesses} == {"t1:x2", "t1:x3"}
        assert {w.relation for w in casimir.witnesses} == {"[pi,h_a]"}

    def test_size_mismatch_rejected(self, r2gravity):
        with pytest.raises(AlgebraError):
            verify_action(r2gravity.model, LieAlgebra(("t1", "t2")), r2gravity.action)

    def test_vector_fields_are_varpi_hamiltonian(self, r2gravity):
        (v,) = hamilton_vector_fields(r2gravity.model, r2gravity.action)
        assert v == hamilton_components(r2gravity.model, r2gravity.action.hamiltonians[0], "varpi")

    def test_pi_is_invariant(self, r2gravity):
        report = invariance_check(r2gravity.model, r2gravity.action, "pi")
        assert report.passed
        assert report.name == "pi invariance"


class TestPoissonAction:
    @pytest.fixture
    def rotations(self, so3_casimir):
        model = so3_casimir.model
        space = model.space
        return [hamilton_components(model, parse_expression(c, space)) for c in space.coordinates]

    def test_rotations_represent_so3(self, so3_casimir, rotations):
        L = LieAlgebra(("t1", "t2", "t3"), SO3_CONSTANTS)
        reports = verify_action(so3_casimir.model, L, ActionSpec.poisson(rotations))
        assert [r.name for r in reports] == ["action bracket", "action poisson"]
        assert all(r.passed for r in reports)

    def test_wrong_algebra_fails_bracket(self, so3_casimir, rotations):
        L = LieAlgebra(("t1", "t2", "t3"))
        bracket, poisson = verify_action(so3_casimir.model, L, ActionSpec.poisson(rotations))
        assert not bracket.passed
        assert poisson.passed

    def test_translation_is_not_poisson(self, so3_casimir):
        space = so3_casimir.model.space
        one, zero = space.constant(1), space.zero()
        action = ActionSpec.poisson([(one, zero, zero)])
        _, poisson = verify_action(so3_casimir.model, LieAlgebra(("t1",)), action)
        assert not poisson.passed

    def test_unknown_kind_rejected(self):
        with pytest.raises(AlgebraError):
            ActionSpec(kind="adjoint")


# ---------------------------------------------------------------------------
# Affine Lie–Poisson models
# ---------------------------------------------------------------------------

class TestAffineLiePoisson:
    def test_builder_reproduces_gallery_model(self):
        gallery = load_gallery_model("affine_kks").model
        space = gallery.space
        built = build_kks_model(space, KKS_STRUCTURE, {("x0", "x1"): parse_expression("a", space)})
        assert built.varpi == gallery.varpi
        assert built.theta == gallery.theta

    def test_reversed_pair_is_negated(self):
        space = load_gallery_model("affine_kks").model.space
        forward = build_kks_model(space, {("x0", "x1", "x2"): 1}, {})
        backward = build_kks_model(space, {("x1", "x0", "x2"): -1}, {})
        assert forward.varpi == backward.varpi

    def test_cocycle_must_be_constant(self):
        space = load_gallery_model("affine_kks").model.space
        with pytest.raises(AlgebraError):
            build_kks_model(space, KKS_STRUCTURE, {("x0", "x1"): parse_expression("x2", space)})

    @pytest.mark.parametrize("structure, cocycle", [
        ({("x0", "x1", "x2"): 1, ("x1", "x0", "x2"): 1}, {}),
        ({("x0", "x0", "x2"): 1}, {}),
        (KKS_STRUCTURE, {("x0", "x1"): 1, ("x1", "x0"): 1}),
        (KKS_STRUCTURE, {("x2", "x2"): 3}),
    ])
    def test_conditions_reject_inconsistent_pairs(self, structure, cocycle):
        space = load_gallery_model("affine_kks").model.space
        with pytest.raises(AlgebraError):
            kks_conditions(space, structure, cocycle)

    def test_conditions_accept_consistent_reversed_pairs(self):
        space = load_gallery_model("affine_kks").model.space
        both = {("x0", "x1", "x2"): 1, ("x1", "x0", "x2"): -1}
        assert kks_conditions(space, both, {("x0", "x1"): 2, ("x1", "x0"): -2}) == ({}, {})


    def test_affine_conditions_vanish(self):
        space = load_gallery_model("affine_kks").model.space
        jacobi, cocycle = kks_conditions(space, KKS_STRUCTURE, {("x0", "x1"): parse_expression("a", space)})
        assert jacobi == {}
        assert cocycle == {}

    def test_non_cocycle_residual(self):
        loaded = load_gallery_model("kks_noncocycle")
        space = loaded.model.space
        cocycle = {("x0", "x1"): parse_expression("a", space), ("x2", "x3"): 1}
        jacobi, residuals = kks_conditions(space, KKS_STRUCTURE, cocycle)
        assert jacobi == {}
        assert residuals == {("x0", "x1", "x3"): space.constant(1)}
        assert not compatibility_check(loaded.model).passed

    def test_non_cocycle_keeps_varpi_poisson(self):
        varpi, theta, _ = model_structure_check(load_gallery_model("kks_noncocycle").model)
        assert varpi.passed and theta.passed
