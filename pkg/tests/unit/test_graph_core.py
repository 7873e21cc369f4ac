"""
Tests de términos de vértice, grafos finitos y el grupoide de isomorfismos parciales
"""
import pytest
from hypothesis import given, settings, strategies as st

from app.exceptions import InvalidVertex
from app.models.graph import (
    FiniteGraph,
    PartialIso,
    groupoid_compose,
    groupoid_invert,
    groupoid_orbit,
    induced_subgraph,
    is_open_morphism,
    validate_partial_iso,
)
from app.models.terms import Base, SetTerm, Tower, format_vertex, parse_limit_term, parse_nat


class TestVertexTerms:

    def test_bit_strings(self):
        assert parse_nat("12") == 12
        assert parse_nat("2^3+2^0") == 9
        big = parse_nat("2^5000")
        assert isinstance(big, Tower)
        assert format_vertex(big) == "2^5000"
        assert big > 10 ** 6

    def test_nested_tower_round_trip(self):
        text = "2^(2^5000)+2^1"
        assert format_vertex(parse_nat(text)) == text

    def test_set_term_format(self):
        term = SetTerm(1, [Base(2), Base(0)])
        assert str(term) == "{b0,b2}"
        assert str(SetTerm(3, [Base(1)])) == "{b1}@3"
        assert parse_limit_term("{b0,b2}") == term
        assert parse_limit_term("{b1}@3") == SetTerm(3, [Base(1)])

    def test_set_term_requires_lower_stage(self):
        with pytest.raises(InvalidVertex):
            SetTerm(1, [SetTerm(1, [Base(0)])])
        with pytest.raises(InvalidVertex):
            SetTerm(1, [])


class TestFiniteGraph:

    def test_edges_are_unordered(self, path_seed):
        assert path_seed.adjacent(Base(0), Base(1))
        assert path_seed.adjacent(Base(1), Base(0))
        assert not path_seed.adjacent(Base(0), Base(2))
        assert path_seed.sorted_edges() == [(Base(0), Base(1))]

    def test_loop_rejected(self):
        with pytest.raises(InvalidVertex):
            FiniteGraph.from_pairs([Base(0)], [(Base(0), Base(0))])

    def test_to_networkx(self, path_seed):
        graph = path_seed.to_networkx()
        assert graph.number_of_nodes() == 3
        assert graph.number_of_edges() == 1


class TestPartialIsomorphisms:

    def test_validation_reports_adjacency(self, bit):
        ok, violation = validate_partial_iso({0: 0, 1: 2}, bit)
        assert not ok
        assert violation.kind == "adjacency"
        assert validate_partial_iso({0: 1, 1: 0}, bit) == (True, None)

    def test_non_injective_rejected(self):
        with pytest.raises(InvalidVertex):
            PartialIso({0: 5, 1: 5})

    def test_compose_and_invert(self):
        phi = PartialIso({1: 2, 2: 3})
        psi = PartialIso({0: 1, 5: 9})
        assert groupoid_compose(phi, psi) == PartialIso({0: 2})
        assert groupoid_invert(phi) == PartialIso({2: 1, 3: 2})

    def test_orbit_closure(self):
        family = [PartialIso({0: 1}), PartialIso({1: 2})]
        assert groupoid_orbit(family, [2]) == frozenset({0, 1, 2})

    @given(st.lists(st.integers(min_value=0, max_value=15), min_size=1, max_size=5, unique=True), st.randoms())
    @settings(max_examples=40, deadline=None)
    def test_inverse_of_valid_map_is_valid(self, domain, rnd):
        from app.algorithms.backends import BitBackend

        bit = BitBackend()
        image = list(domain)
        rnd.shuffle(image)
        pairs = dict(zip(domain, image))
        if validate_partial_iso(pairs, bit)[0]:
            assert validate_partial_iso(groupoid_invert(PartialIso(pairs)), bit)[0]

    def test_induced_subgraph_inclusion_is_open(self, bit):
        window = [0, 1, 2, 3, 5]
        sub = induced_subgraph(window, bit)
        ambient = induced_subgraph(range(8), bit)
        assert is_open_morphism(sub, ambient, {v: v for v in window})
        assert not is_open_morphism(sub, ambient, {0: 0, 1: 2, 2: 1, 3: 3, 5: 5})
