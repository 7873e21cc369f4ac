"""
Tests de extensiones aleatorias, acciones inducidas y la acción base canónica
"""
import pytest
from sympy.combinatorics import Permutation

from app.algorithms.limits import (
    admissible,
    canonical_base_action,
    fixed_vertices,
    is_fixed,
    iterate_extensions,
    lift_action,
    orbit_decomposition,
    permutation_rule,
    property_f_witness,
    random_extension,
    seed_action,
)
from app.algorithms.witnesses import Disconnect, verify_disconnect, verify_property_f, witness_search
from app.config import settings
from app.exceptions import EmptyGraph, FiniteGroupRejected, InvalidInput
from app.models.graph import FiniteGraph
from app.models.groups import FiniteTableGroup
from app.models.terms import Base, SetTerm


def _edgeless(n: int) -> FiniteGraph:
    return FiniteGraph.from_pairs([Base(i) for i in range(n)], [])


def _symmetric(n: int) -> FiniteTableGroup:
    cycle = Permutation(list(range(1, n)) + [0])
    swap = Permutation([1, 0] + list(range(2, n)))
    return FiniteTableGroup.from_permutations(f"S{n}", [swap, cycle])


def _element_with(group: FiniteTableGroup, array_form):
    for g in group.elements():
        perm = group.permutation(g)
        if list(perm.array_form) + list(range(perm.size, len(array_form))) == list(array_form):
            return g
    raise AssertionError(f"sin elemento {array_form}")


class TestRandomExtension:

    def test_admissible_sizes(self):
        assert admissible(1, 1)
        assert not admissible(2, 2)
        assert admissible(3, 2)
        assert not admissible(0, 1)

    def test_vertex_counts(self):
        assert len(random_extension(_edgeless(2), 1)) == 5
        assert len(random_extension(_edgeless(3), 2)) == 7

    def test_new_vertices_see_exactly_their_members(self, path_seed):
        extended = random_extension(path_seed, 1)
        term = SetTerm(1, [Base(0)])
        assert extended.adjacent(term, Base(0))
        assert not extended.adjacent(term, Base(1))
        assert extended.adjacent(Base(0), Base(1))

    def test_tower_of_extensions(self):
        tower = iterate_extensions(_edgeless(1), 1, 2)
        assert [len(g) for g in tower] == [1, 2, 5]

    def test_empty_graph_rejected(self):
        with pytest.raises(EmptyGraph):
            random_extension(FiniteGraph.from_pairs([], []), 1)


class TestInducedActions:

    def test_seed_action_requires_automorphisms(self, path_seed):
        group = FiniteTableGroup.from_permutations("P", [Permutation([0, 2, 1])])
        with pytest.raises(InvalidInput):
            seed_action(group, path_seed, permutation_rule(group))

    def test_lifted_action_is_by_automorphisms(self):
        S3 = _symmetric(3)
        lifted = lift_action(seed_action(S3, _edgeless(3), permutation_rule(S3)))
        assert all(lifted.is_automorphism(g) for g in S3.elements())

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_fixed_vertices_match_brute_force(self, n):
        Sn = _symmetric(n)
        lifted = lift_action(seed_action(Sn, _edgeless(n), permutation_rule(Sn)))
        for g in Sn.elements():
            expected = [x for x in lifted.graph.vertices if lifted.act(g, x) == x]
            assert fixed_vertices(g, lifted) == expected

    def test_transposition_fixed_points(self):
        S3 = _symmetric(3)
        lifted = lift_action(seed_action(S3, _edgeless(3), permutation_rule(S3)))
        g = _element_with(S3, [1, 0, 2])
        fixed = fixed_vertices(g, lifted)
        assert Base(2) in fixed
        assert SetTerm(1, [Base(0), Base(1)]) in fixed
        assert SetTerm(1, [Base(0)]) not in fixed
        assert len(fixed) == 4

    def test_double_transposition_on_four_vertices(self):
        S4 = _symmetric(4)
        lifted = lift_action(seed_action(S4, _edgeless(4), permutation_rule(S4)))
        g = _element_with(S4, [1, 0, 3, 2])
        stage_one = [x for x in fixed_vertices(g, lifted) if isinstance(x, SetTerm)]
        assert len(stage_one) == 3


class TestCanonicalBaseAction:

    def test_finite_group_rejected(self, z3):
        with pytest.raises(FiniteGroupRejected):
            canonical_base_action(z3)

    def test_left_multiplication(self, integers):
        action = canonical_base_action(integers)
        a = integers.letters()["a"]
        one = Base(integers.identity())
        assert action.act(a, one) == Base(a)
        assert action.act(a.inverse(), action.act(a, one)) == one

    def test_parameter_from_sigma(self, z_z2):
        assert canonical_base_action(z_z2, sigma=z_z2.sigma_elements()).backend.l == 1
        assert canonical_base_action(z_z2, l=2).backend.l == 2

    def test_property_f_witness(self, integers):
        action = canonical_base_action(integers)
        a = integers.letters()["a"]
        F = {Base(integers.identity()), Base(a)}
        S = [a, a * a]
        x = property_f_witness(action, S, F)
        assert verify_property_f(action, x, S, F)

    def test_property_f_without_elements(self, integers):
        action = canonical_base_action(integers)
        x = property_f_witness(action, [], [])
        assert verify_property_f(action, x, [], [])

    def test_fixed_vertices_default_window_on_infinite_backend(self, integers):
        action = canonical_base_action(integers)
        a = integers.letters()["a"]
        assert fixed_vertices(a, action) == []
        everything = fixed_vertices(integers.identity(), action)
        assert everything == action.backend.enumerate(settings.RADO_WINDOW)


@pytest.fixture
def rotated_hexagon():
    """C6 rotando el ciclo b0 - b1 - … - b5 - b0, y su levantamiento."""
    C6 = FiniteTableGroup.from_permutations("C6", [Permutation([1, 2, 3, 4, 5, 0])])
    cycle = FiniteGraph.from_pairs([Base(i) for i in range(6)], [(Base(i), Base((i + 1) % 6)) for i in range(6)])
    seed = seed_action(C6, cycle, permutation_rule(C6))
    return seed, lift_action(seed)


class TestLiftTransfer:

    def test_base_orbits_agree(self, rotated_hexagon):
        seed, lifted = rotated_hexagon
        elements = seed.group.elements()
        for i in range(6):
            x = Base(i)
            assert set(lifted.orbit_of(elements, x)) == set(seed.orbit_of(elements, x))

    def test_set_term_orbits_follow_member_orbits(self, rotated_hexagon):
        seed, lifted = rotated_hexagon
        elements = seed.group.elements()
        terms = [v for v in lifted.graph.vertices if isinstance(v, SetTerm)]
        assert len(terms) == 63
        for U in terms:
            member_images = {frozenset(seed.act(g, m) for m in U.members) for g in elements}
            assert len(lifted.orbit_of(elements, U)) == len(member_images)

    def test_orbit_decomposition_agrees(self, rotated_hexagon):
        seed, lifted = rotated_hexagon
        for g in seed.group.elements():
            for U in (v for v in lifted.graph.vertices if isinstance(v, SetTerm)):
                decomposition = orbit_decomposition(lifted, g, U.members)
                assert decomposition == orbit_decomposition(seed, g, U.members)
                assert is_fixed(lifted, g, U) == (lifted.act(g, U) == U)
                assert (decomposition is not None) == is_fixed(lifted, g, U)

    @pytest.mark.parametrize("indices", [(0,), (1,), (0, 1), (2, 3)])
    def test_disconnect_in_lift_holds_in_seed(self, rotated_hexagon, indices):
        seed, lifted = rotated_hexagon
        F = frozenset(Base(i) for i in indices)
        g = witness_search(lifted, Disconnect(F))
        assert verify_disconnect(lifted, g, F)
        assert verify_disconnect(seed, g, F)

    @pytest.mark.parametrize(
        "lifted_F",
        [
            [SetTerm(1, [Base(0)])],
            [Base(0), SetTerm(1, [Base(0), Base(1)])],
            [SetTerm(1, [Base(1)]), SetTerm(1, [Base(0), Base(1)])],
        ],
    )
    def test_disconnect_in_seed_holds_in_lift(self, rotated_hexagon, lifted_F):
        seed, lifted = rotated_hexagon
        assert all(v in lifted.graph for v in lifted_F)
        reduced = set()
        for v in lifted_F:
            reduced |= set(v.members) if isinstance(v, SetTerm) else {v}
        g = witness_search(seed, Disconnect(frozenset(reduced)))
        assert verify_disconnect(seed, g, reduced)
        assert verify_disconnect(lifted, g, lifted_F)
