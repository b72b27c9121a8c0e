"""
tests/test_observables.py — Equivariant classes and BV observables from components.
"""

import pytest  # type: ignore

from app.services.exact_algebra import AlgebraError  # type: ignore
from app.services.expression_parser import parse_expression  # type: ignore
from app.services.observables import (  # type: ignore
    bv_observable_check,
    equivariant_class_check,
    observable_from_components,
)
from app.services.poisson_geometry import geometry_table, multivector  # type: ignore


def _components(ctx, entries):
    return {tuple(k.split(".")) if k else (): parse_expression(v, ctx.space) for k, v in entries.items()}


@pytest.fixture
def varpi_observable(so3_ctx):
    entries = {"x1.x2": "x3", "x2.x3": "x1", "x1.x3": "-x2"}
    return observable_from_components(so3_ctx, _components(so3_ctx, entries))


class TestMultivectorObservables:
    def test_bivector_is_a_class(self, so3_ctx, varpi_observable):
        assert varpi_observable.degree == 2
        assert equivariant_class_check(so3_ctx, varpi_observable).passed

    def test_bivector_is_a_bv_observable(self, so3_ctx, varpi_observable):
        report = bv_observable_check(so3_ctx, varpi_observable)
        assert report.passed
        assert report.name == "multivector observable"

    def test_non_invariant_vector_fails(self, so3_ctx, failing_relations):
        beta = observable_from_components(so3_ctx, _components(so3_ctx, {"x1": "1"}))
        report = equivariant_class_check(so3_ctx, beta)
        assert not report.passed
        assert report.name == "multivector class"
        assert "[h(t1),beta]" in failing_relations(report)

    def test_decomposition_holds_even_when_failing(self, so3_ctx, failing_relations):
        beta = observable_from_components(so3_ctx, _components(so3_ctx, {"x1": "1"}))
        report = bv_observable_check(so3_ctx, beta)
        assert not report.passed
        assert "w beta - decomposition" not in failing_relations(report)


class TestFormObservables:
    def test_casimir_function_is_a_class(self, so3_ctx):
        h = so3_ctx.action.hamiltonians[0]
        sigma = observable_from_components(so3_ctx, {(): h}, form=True)
        assert equivariant_class_check(so3_ctx, sigma).passed
        assert bv_observable_check(so3_ctx, sigma).passed

    def test_coordinate_function_fails(self, so3_ctx, failing_relations):
        sigma = observable_from_components(so3_ctx, _components(so3_ctx, {"": "x1"}), form=True)
        report = equivariant_class_check(so3_ctx, sigma)
        assert not report.passed
        assert report.name == "form class"
        assert "k d sigma" in failing_relations(report)

    def test_form_decomposition_is_an_identity(self, so3_ctx, failing_relations):
        sigma = observable_from_components(so3_ctx, _components(so3_ctx, {"": "x1"}), form=True)
        report = bv_observable_check(so3_ctx, sigma)
        assert failing_relations(report) == {"k_pi d sigma"}


class TestObservableInputs:
    def test_unknown_index_rejected(self, so3_ctx):
        with pytest.raises(AlgebraError):
            observable_from_components(so3_ctx, {("x9",): so3_ctx.space.constant(1)})

    def test_foreign_table_rejected(self, so3_ctx):
        foreign = multivector(geometry_table(so3_ctx.space), {("x1",): so3_ctx.space.constant(1)})
        with pytest.raises(AlgebraError):
            equivariant_class_check(so3_ctx, foreign)
