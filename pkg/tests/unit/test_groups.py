"""
Tests de los descriptores de grupo y sus formas normales
"""
import pytest
from hypothesis import given, settings, strategies as st
from sympy.combinatorics import Permutation

from app.exceptions import GroupTableInvalid, InvalidLetter
from app.models.groups import (
    AmalgamGroup,
    CyclicGroup,
    Embedding,
    FiniteTableGroup,
    FreeGroup,
)


class TestCyclicAndFree:

    def test_integers_powers_and_format(self, integers):
        a = integers.letters()["a"]
        assert a * a == integers.power(2)
        assert str(integers.power(2)) == "a^2"
        assert str(integers.identity()) == "1"
        assert (a ** -3).inverse() == integers.power(3)

    def test_enumeration_is_breadth_first(self, integers):
        first = [str(g) for g in integers.enumerate(5)]
        assert first == ["1", "a", "a^-1", "a^2", "a^-2"]

    def test_parse_word_forms(self, integers):
        assert integers.parse_word("a^3 a^-1") == integers.power(2)
        assert integers.parse_word("(2_a)") == integers.power(2)
        assert integers.parse_word("1") == integers.identity()

    def test_unknown_letter_rejected(self, integers):
        with pytest.raises(InvalidLetter):
            integers.parse_word("b")

    def test_free_group_reduction(self):
        F = FreeGroup("F2", ["a1", "a2"])
        a1 = F.generator(0)
        assert F.parse_word("a1 a2 a2^-1") == a1
        w = F.parse_word("a1 a2 a1^-1")
        assert F.word_length(w) == 3
        assert not F.is_cyclically_reduced(w)
        assert F.is_cyclically_reduced(F.parse_word("a1 a2"))
        assert F.letter_sequence(F.parse_word("a2^-2")) == [(1, -1), (1, -1)]

    def test_order_of_infinite_element_is_none(self, integers):
        assert integers.order_of(integers.power(1)) is None
        assert integers.order_of(integers.identity()) == 1


class TestFiniteTableGroup:

    def test_cyclic_table(self, z3):
        r1 = z3.element("r1")
        assert r1 * r1 == z3.element("r2")
        assert z3.order_of(r1) == 3
        assert z3.order() == 3
        assert set(z3.letters()) == {"r1", "r2"}

    def test_non_latin_square_rejected(self):
        with pytest.raises(GroupTableInvalid):
            FiniteTableGroup("bad", ["e", "x"], [[0, 1], [0, 1]])

    def test_non_associative_table_rejected(self):
        # Cuadrado latino con identidad pero sin asociatividad (loop de orden 5)
        table = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
        with pytest.raises(GroupTableInvalid):
            FiniteTableGroup("loop", ["e", "a", "b", "c", "d"], table)

    def test_symmetric_group_from_permutations(self):
        S3 = FiniteTableGroup.from_permutations("S3", [Permutation([1, 0, 2]), Permutation([1, 2, 0])])
        assert S3.order() == 6
        images = {tuple(S3.permutation(g).array_form) for g in S3.elements()}
        assert len(images) == 6

    @given(st.integers(min_value=0, max_value=2), st.integers(min_value=0, max_value=2))
    @settings(max_examples=20, deadline=None)
    def test_cyclic_table_is_abelian(self, i, j):
        z3 = FiniteTableGroup.cyclic("Z3", 3, letter="r")
        g, h = z3.elements()[i], z3.elements()[j]
        assert g * h == h * g


class TestEmbedding:

    def test_non_homomorphism_rejected(self, z3):
        z2 = FiniteTableGroup.cyclic("Z2", 2, letter="x")
        with pytest.raises(GroupTableInvalid):
            Embedding(z2, z3, [z3.identity(), z3.element("r1")])

    def test_wrong_image_count_rejected(self, z3):
        z2 = FiniteTableGroup.cyclic("Z2", 2, letter="x")
        with pytest.raises(GroupTableInvalid):
            Embedding(z2, z3, [z3.identity()])


class TestAmalgam:

    def test_free_product_is_not_abelian(self, z_z):
        a, b = z_z.letters()["a"], z_z.letters()["b"]
        assert a * b != b * a
        assert z_z.syllable_length(a * b * a) == 3
        assert z_z.parse_word("a b") == z_z.embed(0, z_z.factors[0].letters()["a"]) * b
        assert (a * b).inverse() * (a * b) == z_z.identity()
        assert not z_z.is_finite()

    def test_shared_letters_rejected(self, trivial):
        za, zb = CyclicGroup("A", letter="a"), CyclicGroup("B", letter="a")
        with pytest.raises(GroupTableInvalid):
            AmalgamGroup("bad", (za, zb), trivial, ([za.identity()], [zb.identity()]))

    def test_amalgamated_subgroup_is_identified(self):
        A = FiniteTableGroup.cyclic("A", 4, letter="p")
        B = FiniteTableGroup.cyclic("B", 4, letter="q")
        S = FiniteTableGroup.cyclic("S", 2, letter="x")
        G = AmalgamGroup("A*B", (A, B), S, ([A.identity(), A.element("p2")], [B.identity(), B.element("q2")]))
        assert G.embed(0, A.element("p2")) == G.embed(1, B.element("q2"))
        assert not G.is_finite()
        g = G.embed(0, A.element("p1")) * G.embed(1, B.element("q1"))
        assert G.syllable_length(g) == 2
        assert G.factor_of(G.embed(1, B.element("q3"))) == 1

    def test_reduced_expression_round_trip(self, z_z):
        g = z_z.parse_word("a^2 b^-1 a")
        assert z_z.product([z_z.embed(i, x) for i, x in z_z.reduced_expression(g)]) == g


class TestHNN:

    def test_stable_letter_conjugates_sigma(self, hnn_group):
        t = hnn_group.stable(1)
        s = hnn_group.sigma_pairs()[1][0]
        assert t * s * t.inverse() == hnn_group.sigma_pairs()[1][1]

    def test_britton_length(self, hnn_group):
        t = hnn_group.stable(1)
        r = hnn_group.letters()["r1"]
        g = t * r * t
        assert hnn_group.t_length(g) == 2
        assert hnn_group.t_length(t * t.inverse()) == 0
        cosets, signs = hnn_group.britton_expression(g)
        assert signs == [1, 1]
        assert len(cosets) == 3

    def test_stable_letter_clash_rejected(self, z2_z3):
        from app.models.groups import HNNGroup

        S = FiniteTableGroup.cyclic("S", 2, letter="x")
        images = [z2_z3.identity(), z2_z3.letters()["s1"]]
        with pytest.raises(GroupTableInvalid):
            HNNGroup("bad", z2_z3, S, images, images, stable_letter="r1")
