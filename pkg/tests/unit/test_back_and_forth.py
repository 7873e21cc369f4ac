"""
Tests del back-and-forth perezoso y su versión equivariante
"""
import pytest

from app.algorithms.back_and_forth import EquivarianceContext, extend_to_automorphism, verify_window
from app.algorithms.limits import canonical_base_action
from app.exceptions import CommitConflict, EquivarianceViolated, InvalidPartialIso
from app.algorithms.backends import LimitBackend
from app.models.terms import Base, SetTerm


class TestLazyAutomorphism:

    def test_forth_step_uses_least_witness(self, bit):
        aut = extend_to_automorphism({0: 2}, bit)
        assert aut.query(0) == 2
        assert aut.query(1) == 1
        assert aut.steps == 1

    def test_invalid_map_rejected(self, bit):
        with pytest.raises(InvalidPartialIso):
            extend_to_automorphism({0: 0, 1: 2}, bit)

    def test_window_verification(self, bit):
        aut = extend_to_automorphism({0: 2}, bit)
        report = verify_window(aut, range(12))
        assert report.passed
        assert report.to_dict()["answered"] == 12

    def test_inverse_queries_and_forced_steps(self, bit):
        aut = extend_to_automorphism({0: 2}, bit)
        x = aut.query_inv(0)
        assert aut.query(x) == 0
        before = len(aut)
        aut.advance(4)
        assert len(aut) >= before + 4
        assert verify_window(aut, range(6)).passed

    def test_committed_part_only_grows(self, bit):
        aut = extend_to_automorphism({0: 2}, bit)
        aut.query(1)
        with pytest.raises(CommitConflict):
            aut.commit({1: 3})
        with pytest.raises(CommitConflict):
            aut.commit({5: 2})
        with pytest.raises(InvalidPartialIso):
            aut.commit({3: 8})
        assert aut.committed.as_dict() == {0: 2, 1: 1}

    def test_limit_backend(self, path_seed):
        limit = LimitBackend(path_seed)
        aut = extend_to_automorphism({Base(0): Base(2)}, limit)
        assert aut.query(Base(1)) == SetTerm(1, [Base(2)])
        assert verify_window(aut, limit.enumerate(8)).passed


class TestEquivariantExtension:

    @pytest.fixture
    def context(self, z2_z3):
        action = canonical_base_action(z2_z3, l=2)
        s = z2_z3.letters()["s1"]
        return EquivarianceContext(action, [(s, s)])

    def test_orbits_are_committed_together(self, z2_z3, context):
        s, r = z2_z3.letters()["s1"], z2_z3.letters()["r1"]
        one = z2_z3.identity()
        phi = {Base(one): Base(r), Base(s): Base(s * r)}
        aut = extend_to_automorphism(phi, context.action.backend, context)
        window = context.action.backend.enumerate(6)
        report = verify_window(aut, window)
        assert report.passed
        for x in window:
            assert aut.query(context.action.act(s, x)) == context.action.act(s, aut.query(x))

    def test_non_equivariant_map_rejected(self, z2_z3, context):
        r = z2_z3.letters()["r1"]
        with pytest.raises(EquivarianceViolated):
            extend_to_automorphism({Base(z2_z3.identity()): Base(r)}, context.action.backend, context)
