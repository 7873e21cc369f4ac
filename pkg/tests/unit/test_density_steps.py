"""
Tests de los pasos de densidad para amalgamas y extensiones HNN
"""
import pytest

from app.algorithms.density_steps import (
    AmalgamSetup,
    HNNSetup,
    density_step_faithful,
    density_step_homogeneous,
    density_step_homogeneous_finite_factor,
    pi_alpha_apply,
)
from app.exceptions import CommitConflict, InvalidInput, InvalidPartialIso, NotReduced
from app.models.graph import validate_partial_iso
from app.models.terms import Base


def _realizes(setup, outcome) -> bool:
    return all(pi_alpha_apply(setup, outcome.element, x) == y for x, y in outcome.phi.items())


def _alpha_is_partial_iso(setup) -> bool:
    return validate_partial_iso(setup.alpha.committed, setup.backend)[0]


class TestAmalgamSteps:

    def test_first_factor_must_be_infinite(self, z2_z3):
        with pytest.raises(InvalidInput):
            AmalgamSetup(z2_z3)

    def test_homogeneity(self, z_z):
        setup = AmalgamSetup(z_z)
        a = z_z.letters()["a"]
        phi = {Base(z_z.identity()): Base(a)}
        outcome = density_step_homogeneous(setup, phi)
        assert _realizes(setup, outcome)
        assert outcome.new_pairs > 0
        assert outcome.checks
        assert _alpha_is_partial_iso(setup)

    def test_identity_map_needs_no_commitment(self, z_z):
        setup = AmalgamSetup(z_z)
        one = Base(z_z.identity())
        outcome = density_step_homogeneous(setup, {one: one})
        assert outcome.element.is_identity
        assert outcome.new_pairs == 0

    def test_invalid_map_rejected(self, z_z):
        setup = AmalgamSetup(z_z)
        with pytest.raises(InvalidPartialIso):
            density_step_homogeneous(setup, {Base(z_z.identity()): Base(z_z.identity()), Base(z_z.letters()["a"]): Base(z_z.identity())})

    def test_support_must_contain_committed_domain(self, z_z):
        setup = AmalgamSetup(z_z)
        a = z_z.letters()["a"]
        density_step_homogeneous(setup, {Base(z_z.identity()): Base(a)})
        with pytest.raises(CommitConflict):
            density_step_homogeneous(setup, {Base(a): Base(z_z.identity())}, F=[])

    def test_consecutive_steps_keep_earlier_certificates(self, z_z):
        setup = AmalgamSetup(z_z)
        a, b = z_z.letters()["a"], z_z.letters()["b"]
        first = density_step_homogeneous(setup, {Base(z_z.identity()): Base(a)})
        second = density_step_homogeneous(setup, {Base(b): Base(a * b)})
        assert _realizes(setup, second)
        assert _realizes(setup, first)

    @pytest.mark.parametrize("word", ["a", "b", "a b", "b^-1 a^2 b"])
    def test_faithfulness(self, z_z, word):
        setup = AmalgamSetup(z_z)
        g = z_z.parse_word(word)
        outcome = density_step_faithful(setup, g)
        assert pi_alpha_apply(setup, g, outcome.vertex) == outcome.image
        assert outcome.image != outcome.vertex
        assert _alpha_is_partial_iso(setup)

    def test_identity_cannot_be_separated(self, z_z):
        with pytest.raises(NotReduced):
            density_step_faithful(AmalgamSetup(z_z), z_z.identity())


class TestFiniteFactorSteps:

    def test_finite_factor_homogeneity(self, z_z2):
        setup = AmalgamSetup(z_z2)
        assert setup.finite_factor
        assert setup.backend.l == 2
        a = z_z2.letters()["a"]
        phi = {Base(z_z2.identity()): Base(a)}
        outcome = density_step_homogeneous_finite_factor(setup, phi)
        assert _realizes(setup, outcome)
        assert _alpha_is_partial_iso(setup)

    def test_requires_finite_second_factor(self, z_z):
        setup = AmalgamSetup(z_z)
        with pytest.raises(InvalidInput):
            density_step_homogeneous_finite_factor(setup, {})

    def test_faithfulness_with_finite_factor(self, z_z2):
        setup = AmalgamSetup(z_z2)
        g = z_z2.parse_word("a c1")
        outcome = density_step_faithful(setup, g)
        assert outcome.image != outcome.vertex


class TestHNNSteps:

    def test_homogeneity(self, hnn_group):
        setup = HNNSetup(hnn_group)
        r = hnn_group.letters()["r1"]
        phi = {Base(hnn_group.identity()): Base(r)}
        outcome = density_step_homogeneous(setup, phi)
        assert _realizes(setup, outcome)
        assert hnn_group.t_length(outcome.element) == 1
        assert _alpha_is_partial_iso(setup)

    @pytest.mark.parametrize("word", ["r1", "t", "t r1 t^-1"])
    def test_faithfulness(self, hnn_group, word):
        setup = HNNSetup(hnn_group)
        g = hnn_group.parse_word(word)
        outcome = density_step_faithful(setup, g)
        assert pi_alpha_apply(setup, g, outcome.vertex) == outcome.image
        assert outcome.image != outcome.vertex

    def test_element_of_other_group_rejected(self, hnn_group, z_z):
        with pytest.raises(InvalidInput):
            density_step_faithful(HNNSetup(hnn_group), z_z.letters()["a"])
