"""
Tests de los backends del grafo aleatorio
"""
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from app.algorithms.backends import BitBackend, Delete, LimitBackend, Slice, lex_subsets, verify_witness
from app.exceptions import DisjointnessViolated, InvalidVertex, LoopQuery
from app.models.graph import FiniteGraph, induced_subgraph
from app.models.terms import Base, SetTerm, Tower, term_key


class TestBitBackend:

    def test_adjacency_by_binary_expansion(self, bit):
        assert bit.adjacent(0, 1)
        assert bit.adjacent(1, 2)
        assert not bit.adjacent(0, 2)
        assert bit.adjacent(2, 1)

    def test_loop_and_invalid_vertex(self, bit):
        with pytest.raises(LoopQuery):
            bit.adjacent(3, 3)
        with pytest.raises(InvalidVertex):
            bit.adjacent(-1, 2)

    def test_window_edge_count(self, bit):
        assert len(induced_subgraph(range(8), bit).edges) == 12

    def test_least_witness(self, bit):
        assert bit.property_r_witness([0], [1]) == 5
        assert bit.property_r_witness([], []) == 0

    def test_disjointness_enforced(self, bit):
        with pytest.raises(DisjointnessViolated):
            bit.property_r_witness([1, 2], [2])

    def test_tower_vertices(self, bit):
        tower = Tower([5000])
        assert bit.adjacent(5000, tower)
        assert not bit.adjacent(4999, tower)
        assert bit.property_r_witness([tower], []) == 5000

    def test_all_disjoint_pairs_on_small_window(self, bit):
        window = list(range(6))
        for labels in product(range(3), repeat=len(window)):
            U = [v for v, t in zip(window, labels) if t == 1]
            V = [v for v, t in zip(window, labels) if t == 2]
            assert verify_witness(bit, bit.property_r_witness(U, V), U, V)

    @given(st.sets(st.integers(min_value=0, max_value=200), max_size=4), st.sets(st.integers(min_value=0, max_value=200), max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_witness_property(self, U, V):
        bit = BitBackend()
        V = V - U
        z = bit.property_r_witness(U, V)
        assert verify_witness(bit, z, U, V)

    def test_enumeration_prefix(self, bit):
        assert bit.enumerate(5) == [0, 1, 2, 3, 4]
        assert bit.enumerate(3) == bit.enumerate(6)[:3]


class TestDerivedBackends:

    def test_delete(self, bit):
        deleted = bit.derive(Delete(frozenset({0})))
        assert deleted.enumerate(3) == [1, 2, 3]
        assert deleted.property_r_witness([], []) == 1
        assert not deleted.is_vertex(0)

    def test_slice(self, bit):
        sliced = bit.derive(Slice(frozenset({0}), frozenset({1})))
        assert sliced.enumerate(1) == [5]
        z = sliced.property_r_witness([5], [])
        assert sliced.is_vertex(z)
        assert bit.adjacent(z, 5)

    def test_derived_backend_parses_and_validates(self, bit):
        deleted = bit.derive(Delete(frozenset({2})))
        assert deleted.parse_vertex("3") == 3
        with pytest.raises(InvalidVertex):
            deleted.parse_vertex("2")


class TestLimitBackend:

    def test_enumeration_order(self, path_seed):
        limit = LimitBackend(path_seed)
        first = limit.enumerate(6)
        assert first[:3] == [Base(0), Base(1), Base(2)]
        assert first[3:6] == [
            SetTerm(1, [Base(0)]),
            SetTerm(1, [Base(0), Base(1)]),
            SetTerm(1, [Base(0), Base(1), Base(2)]),
        ]

    def test_each_stage_is_lexicographic(self, path_seed):
        limit = LimitBackend(path_seed)
        first = limit.enumerate(10)
        assert [str(v) for v in first[3:]] == ["{b0}", "{b0,b1}", "{b0,b1,b2}", "{b0,b2}", "{b1}", "{b1,b2}", "{b2}"]
        assert first == sorted(first, key=term_key)

    def test_stage_two_prefix_is_lexicographic(self):
        limit = LimitBackend(FiniteGraph.from_pairs([Base(0), Base(1)], []))
        window = limit.enumerate(40)
        stage_two = [v for v in window if v.stage == 2]
        assert len(stage_two) > 20
        assert stage_two == sorted(stage_two, key=term_key)
        assert window == sorted(window, key=term_key)

    def test_lex_subsets(self):
        assert list(lex_subsets(3)) == [(0,), (0, 1), (0, 1, 2), (0, 2), (1,), (1, 2), (2,)]
        assert list(lex_subsets(0)) == []
        assert len(list(lex_subsets(6))) == 63

    def test_parameter_skips_inadmissible_sizes(self, path_seed):
        limit = LimitBackend(path_seed, l=2)
        stage_one = [v for v in limit.enumerate(7) if v.stage == 1]
        assert [str(v) for v in stage_one] == ["{b0}", "{b0,b1,b2}", "{b1}", "{b2}"]

    def test_structural_adjacency(self, path_seed):
        limit = LimitBackend(path_seed)
        term = SetTerm(1, [Base(0), Base(2)])
        assert limit.adjacent(Base(0), Base(1))
        assert limit.adjacent(term, Base(2))
        assert not limit.adjacent(term, Base(1))

    def test_constructive_witness(self, path_seed):
        limit = LimitBackend(path_seed)
        assert limit.property_r_witness([Base(0)], [Base(1)]) == SetTerm(1, [Base(0)])
        assert limit.property_r_witness([], [Base(0)]) == SetTerm(1, [Base(1)])

    def test_parameter_pads_witness(self, path_seed):
        limit = LimitBackend(path_seed, l=2)
        assert not limit.is_vertex(SetTerm(1, [Base(0), Base(1)]))
        z = limit.property_r_witness([Base(0), Base(1)], [])
        assert z == SetTerm(1, [Base(0), Base(1), Base(2)])

    def test_stage_two_window_witnesses(self, path_seed):
        limit = LimitBackend(path_seed)
        window = limit.enumerate(8)
        for U, V in combinations([frozenset(c) for c in _subsets(window[:5])], 2):
            if U & V:
                continue
            assert verify_witness(limit, limit.property_r_witness(U, V), U, V)

    def test_group_seed(self, integers):
        limit = LimitBackend(integers)
        first = limit.enumerate(2)
        assert str(first[0]) == "b(1)"
        assert limit.parse_vertex("b(a)") == Base(integers.letters()["a"])
        assert not limit.adjacent(first[0], first[1])

    def test_parse_rejects_unknown_base(self, path_seed):
        with pytest.raises(InvalidVertex):
            LimitBackend(path_seed).parse_vertex("b7")


def _subsets(items):
    for mask in range(1 << len(items)):
        yield [x for i, x in enumerate(items) if mask >> i & 1]
