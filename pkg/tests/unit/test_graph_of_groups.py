"""
Tests de grafos de grupos: validación, descomposición y grupo fundamental
"""
import pytest

from app.algorithms.graph_of_groups import GogEdge, GraphOfGroups, decompose_graph_of_groups, fundamental_group
from app.exceptions import EmptyGraph, InvalidEdge
from app.models.groups import AmalgamGroup, CyclicGroup, HNNGroup, trivial_group


@pytest.fixture
def vertex_groups():
    return {
        "P": CyclicGroup("Za", letter="a"),
        "Q": CyclicGroup("Zb", letter="b"),
        "R": CyclicGroup("Zc", letter="c"),
    }


def _edge(name, source, target, groups, **flags):
    one = trivial_group()
    return GogEdge(
        name, source, target, one,
        (groups[source].identity(),), (groups[target].identity(),), **flags,
    )


class TestGraphOfGroupsValidation:

    def test_default_tree_is_first_spanning_choice(self, vertex_groups):
        edges = [
            _edge("e1", "P", "Q", vertex_groups),
            _edge("e2", "Q", "R", vertex_groups),
            _edge("e3", "R", "P", vertex_groups),
        ]
        gog = GraphOfGroups(vertex_groups, edges)
        assert gog.tree == ("e1", "e2")
        assert gog.to_dict()["tree"] == ["e1", "e2"]

    def test_explicit_tree_must_span(self, vertex_groups):
        edges = [_edge("e1", "P", "Q", vertex_groups), _edge("e2", "Q", "R", vertex_groups)]
        with pytest.raises(InvalidEdge):
            GraphOfGroups(vertex_groups, edges, tree=["e1"])

    def test_invalid_edges(self, vertex_groups):
        with pytest.raises(InvalidEdge):
            GraphOfGroups(vertex_groups, [_edge("1e", "P", "Q", vertex_groups)])
        with pytest.raises(InvalidEdge):
            GraphOfGroups(vertex_groups, [_edge("e", "P", "Q", vertex_groups), _edge("e", "Q", "R", vertex_groups)])
        bad = GogEdge("e", "P", "S", trivial_group(), (vertex_groups["P"].identity(),), (vertex_groups["Q"].identity(),))
        with pytest.raises(InvalidEdge):
            GraphOfGroups(vertex_groups, [bad])

    def test_infinite_edge_group_rejected(self, vertex_groups):
        Z = CyclicGroup("Zx", letter="x")
        edge = GogEdge("e", "P", "Q", Z, (), ())
        with pytest.raises(InvalidEdge):
            GraphOfGroups({"P": vertex_groups["P"], "Q": vertex_groups["Q"]}, [edge])

    def test_disconnected_and_empty(self, vertex_groups):
        with pytest.raises(InvalidEdge):
            GraphOfGroups(vertex_groups, [_edge("e1", "P", "Q", vertex_groups)])
        with pytest.raises(EmptyGraph):
            GraphOfGroups({})

    def test_unknown_edge_lookup(self, vertex_groups):
        gog = GraphOfGroups({"P": vertex_groups["P"]})
        with pytest.raises(InvalidEdge):
            gog.edge("e9")

    def test_hypotheses_report(self, vertex_groups):
        edges = [_edge("e1", "P", "Q", vertex_groups, hcf_source=True, hcf_target=True)]
        gog = GraphOfGroups({"P": vertex_groups["P"], "Q": vertex_groups["Q"]}, edges)
        report = gog.hypotheses()
        assert report["vertex_groups_infinite"] == {"P": True, "Q": True}
        assert report["satisfied"]


class TestDecomposition:

    def test_bridge_gives_amalgam(self, vertex_groups):
        edges = [_edge("e1", "P", "Q", vertex_groups), _edge("e2", "Q", "R", vertex_groups)]
        gog = GraphOfGroups(vertex_groups, edges)
        data = decompose_graph_of_groups(gog, "e1")
        assert data.kind == "amalgam"
        assert data.to_dict()["gamma1"] == ["P"]
        assert data.to_dict()["gamma2"] == ["Q", "R"]
        group = data.group()
        assert isinstance(group, AmalgamGroup)
        assert not group.is_finite()

    def test_cycle_edge_gives_hnn(self, vertex_groups):
        edges = [
            _edge("e1", "P", "Q", vertex_groups),
            _edge("e2", "Q", "R", vertex_groups),
            _edge("e3", "R", "P", vertex_groups),
        ]
        gog = GraphOfGroups(vertex_groups, edges)
        data = decompose_graph_of_groups(gog, "e1")
        assert data.kind == "hnn"
        assert data.to_dict()["base"] == ["P", "Q", "R"]
        group = data.group()
        assert isinstance(group, HNNGroup)
        assert group.stable_letter == "e1"

    def test_loop_gives_hnn(self, vertex_groups):
        gog = GraphOfGroups({"P": vertex_groups["P"]}, [_edge("t", "P", "P", vertex_groups)])
        assert gog.edge("t").is_loop
        data = decompose_graph_of_groups(gog, "t")
        assert data.kind == "hnn"
        assert data.theta == {vertex_groups["P"].identity(): vertex_groups["P"].identity()}


class TestFundamentalGroup:

    def test_single_vertex(self, vertex_groups):
        pi = fundamental_group(GraphOfGroups({"P": vertex_groups["P"]}))
        assert pi.group is vertex_groups["P"]
        a = vertex_groups["P"].letters()["a"]
        assert pi.embed("P", a) == a

    def test_tree_and_extra_edge(self, vertex_groups):
        edges = [
            _edge("e1", "P", "Q", vertex_groups),
            _edge("e2", "Q", "R", vertex_groups),
            _edge("e3", "R", "P", vertex_groups),
        ]
        pi = fundamental_group(GraphOfGroups(vertex_groups, edges))
        assert isinstance(pi.group, HNNGroup)
        assert pi.group.stable_letter == "e3"
        a = pi.embed("P", vertex_groups["P"].letters()["a"])
        b = pi.embed("Q", vertex_groups["Q"].letters()["b"])
        assert a * b != b * a
        assert set(pi.group.letters()) == {"a", "b", "c", "e3"}
