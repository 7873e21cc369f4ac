"""
Tests de extensiones elementales, treezation y ventanas de Schreier
"""
import numpy as np
import pytest

from app.algorithms.back_and_forth import extend_to_automorphism
from app.algorithms.treezation import (
    Treezation,
    check_partial_isos,
    elementary_extension,
    evaluate_word,
    extension_edge_failures,
    neumann_witness,
    orbit_growth_failures,
    schreier_distances,
    schreier_window,
    set_diameter,
    word_trajectory,
)
from app.exceptions import InvalidInput
from app.models.graph import PartialIso, validate_partial_iso
from app.models.groups import FreeGroup


@pytest.fixture
def free2() -> FreeGroup:
    return FreeGroup("F2", ["a1", "a2"])


class TestElementaryExtension:

    def test_least_witnesses(self, bit):
        gamma = PartialIso({0: 2})
        extended = elementary_extension(gamma, [gamma], {0, 2}, bit)
        assert extended == PartialIso({0: 2, 2: 10, 8: 0})
        assert validate_partial_iso(extended, bit)[0]

    def test_orbit_edges_come_from_old_edges(self, bit):
        gamma = PartialIso({0: 2})
        extended = elementary_extension(gamma, [gamma], {0, 2}, bit)
        assert extension_edge_failures([gamma], gamma, extended, [0], bit) == []

    def test_gamma_must_belong_to_family(self, bit):
        with pytest.raises(InvalidInput):
            elementary_extension(PartialIso({0: 2}), [PartialIso({1: 1})], (), bit)


class TestTreezation:

    def test_generic_first_round(self, bit):
        tree = Treezation.generic(bit, 2, rounds=1)
        assert tree.committed(0) == PartialIso({0: 8, 2: 0})
        assert tree.committed(1) == PartialIso({})
        assert tree.to_dict()["rounds"][0] == {"round": 0, "map": 1, "z": "0", "new_pairs": 2}

    def test_agrees_with_alphas_on_F(self, bit):
        alpha = extend_to_automorphism({0: 2}, bit)
        tree = Treezation(bit, [alpha], F={0}, rounds=2)
        beta = tree.maps[0]
        assert beta.query(0) == alpha.query(0)
        assert beta.query_inv(0) == alpha.query_inv(0)
        assert tree.guarded >= {0, 2}
        assert check_partial_isos(tree.maps) == []

    def test_fresh_steps_after_materialized_rounds(self, bit):
        tree = Treezation.generic(bit, 2, rounds=2)
        touched = set(tree.touched)
        x = max(touched) + 1
        y = tree.maps[1].query(x)
        assert y not in touched
        assert tree.fresh_steps == 1
        assert tree.maps[1].query_inv(y) == x

    def test_invalid_arguments(self, bit):
        with pytest.raises(InvalidInput):
            Treezation(bit, [])
        with pytest.raises(InvalidInput):
            Treezation.generic(bit, 1, rounds=-1)


class TestSchreierAnalysis:

    def test_generic_window_is_a_tree(self, bit):
        tree = Treezation.generic(bit, 2, rounds=2)
        report = schreier_window(tree.maps, 0, 2, tree.guarded)
        assert report.passed
        assert report.cycles == []
        data = report.to_dict()
        assert data["vertices"] == data["edges"] + 1

    def test_negative_radius_rejected(self, bit):
        tree = Treezation.generic(bit, 1, rounds=0)
        with pytest.raises(InvalidInput):
            schreier_window(tree.maps, 0, -1)

    def test_diameter(self, bit):
        tree = Treezation.generic(bit, 2, rounds=1)
        assert set_diameter(tree.maps, [2, 8]) == (2, True)
        assert set_diameter(tree.maps, [2, 5]) == (0, False)

    def test_orbits_do_not_close(self, bit):
        tree = Treezation.generic(bit, 2, rounds=2)
        assert orbit_growth_failures(tree.maps, [0, 1, 3], 4) == []


class TestWords:

    def test_evaluation_and_trajectory(self, bit, free2):
        tree = Treezation.generic(bit, 2, rounds=1)
        a1 = free2.generator(0)
        assert evaluate_word(tree.maps, free2, a1, 2) == 0
        assert word_trajectory(tree.maps, free2, a1 * a1, 2) == [2, 0, 8]
        assert evaluate_word(tree.maps, free2, a1.inverse(), 8) == 0

    def test_neumann_with_empty_support(self, bit, free2):
        tree = Treezation.generic(bit, 2, rounds=1)
        assert neumann_witness(tree.maps, free2, ()) == free2.generator(0)

    def test_neumann_moves_guarded_set(self, bit, free2):
        alpha = extend_to_automorphism({0: 2}, bit)
        tree = Treezation(bit, [alpha, alpha], F={0}, rounds=2)
        u = neumann_witness(tree.maps, free2, tree.guarded)
        guarded = set(tree.guarded)
        assert all(evaluate_word(tree.maps, free2, u, x) not in guarded for x in guarded)
        assert all(evaluate_word(tree.maps, free2, u * u, x) not in guarded for x in guarded)


def _reduced_words(rng, count: int, rank: int, max_length: int):
    words = []
    for _ in range(count):
        letters = []
        for _ in range(int(rng.integers(1, max_length + 1))):
            while True:
                letter = (int(rng.integers(rank)), int(rng.choice([-1, 1])))
                if not letters or letter != (letters[-1][0], -letters[-1][1]):
                    break
            letters.append(letter)
        words.append(letters)
    return words


class TestIncrementLaw:

    @pytest.fixture
    def seeded(self, bit):
        alphas = [extend_to_automorphism({0: 2}, bit), extend_to_automorphism({0: 1, 1: 0}, bit)]
        return Treezation(bit, alphas, F={0, 1}, rounds=2)

    def test_window_around_guarded_set(self, seeded):
        assert seeded.guarded
        for center in sorted(seeded.guarded):
            report = schreier_window(seeded.maps, center, 3, seeded.guarded)
            assert report.increment_violations == []
            assert report.cycles_outside == []

    @pytest.mark.slow
    def test_sampled_words_move_away_one_step_at_a_time(self, seeded, free2):
        rng = np.random.default_rng(11)
        paths = []
        for letters in _reduced_words(rng, 100, free2.rank, 5):
            w = free2.from_letters(letters)
            assert free2.letter_sequence(w) == letters
            for x in (0, 1):
                paths.append(word_trajectory(seeded.maps, free2, w, x))

        distance = schreier_distances(seeded.maps, seeded.guarded)
        for path in paths:
            outside = [i for i, v in enumerate(path) if v not in seeded.guarded]
            if not outside:
                continue
            first = outside[0]
            assert outside == list(range(first, len(path)))
            assert [distance[v] for v in path[first:]] == list(range(1, len(path) - first + 1))
