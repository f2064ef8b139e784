from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import group_and_elements, moduli
from hypersplit.core import (
    Character,
    Group,
    HomMatrix,
    affine_closure,
    apply_hom,
    char_eval,
    enumerate_elements,
    is_isomorphism,
    make_group,
    parse_matrix,
    parse_qz,
    span,
)
from hypersplit.errors import (
    EmptyInput,
    EnumerationBudgetExceeded,
    GroupMismatch,
    IllDefinedHom,
    InvalidModulus,
)


class TestGroup:
    def test_orders(self):
        assert make_group([2, 3, 4]).order == 24
        assert make_group([5]).order == 5
        assert make_group([2, 2, 2]).order == 8

    @pytest.mark.parametrize("bad", [[1], [2, 0], [3, -4], []])
    def test_rejects_bad_moduli(self, bad):
        with pytest.raises(InvalidModulus):
            make_group(bad)

    def test_parse_literal(self):
        assert Group.parse("2,3,4").moduli == (2, 3, 4)

    def test_enumeration_lexicographic(self):
        assert list(enumerate_elements(Group((2, 2)))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert list(enumerate_elements(Group((3,)))) == [(0,), (1,), (2,)]
        assert len(list(enumerate_elements(Group((2, 3))))) == 6

    def test_budget(self, monkeypatch):
        monkeypatch.setenv("HYPERSPLIT_MAX_ORDER", "10")
        with pytest.raises(EnumerationBudgetExceeded):
            list(enumerate_elements(Group((3, 4))))

    @given(moduli())
    def test_index_roundtrip(self, m):
        g = Group(m)
        for i, a in enumerate(g.elements()):
            assert g.index(a) == i
            assert g.element_at(i) == a

    def test_z_vectors(self):
        g = Group((2, 3, 4))
        assert g.z(1) == (1, 0, 1)
        assert g.ones == (1, 1, 1)


class TestCharacters:
    def test_examples(self):
        assert char_eval(Character(Group((2, 3)), (1, 0)), (1, 2)) == Fraction(1, 2)
        assert char_eval(Character(Group((2, 2)), (1, 1)), (1, 1)) == 0
        assert char_eval(Character(Group((2, 3)), (1, 2)), (1, 1)) == Fraction(1, 6)

    def test_group_mismatch(self):
        with pytest.raises(GroupMismatch):
            char_eval(Character(Group((2, 3)), (1, 0)), (1, 1, 1))
        with pytest.raises(GroupMismatch):
            char_eval(Character(Group((2, 3)), (1, 0)), (2, 1))

    @given(moduli())
    def test_order_formula(self, m):
        g = Group(m)
        for x in g.elements():
            expect = math.lcm(*(n // math.gcd(n, xi) for n, xi in zip(m, x)))
            assert Character(g, x).order == expect

    @given(group_and_elements(count=3))
    def test_homomorphism_property(self, ge):
        g, (x, a, b) = ge
        phi = Character(g, x)
        lhs = phi(g.add(a, b))
        assert lhs == (phi(a) + phi(b)) % 1
        assert lhs == oracles.evaluate(g.moduli, x, g.add(a, b))

    @given(moduli(max_order=24))
    def test_coordinates_to_characters_injective(self, m):
        g = Group(m)
        tables = {tuple(Character(g, x)(a) for a in g.elements()) for x in g.elements()}
        assert len(tables) == g.order

    def test_levels_agree_with_fractions(self):
        g = Group((2, 3, 4))
        lv = g.levels(list(g.elements()))
        for i, a in enumerate(g.elements()):
            for j, x in enumerate(g.elements()):
                assert Fraction(int(lv[i, j]), g.exponent) == oracles.evaluate(g.moduli, x, a)


class TestHomMatrix:
    def test_examples(self):
        z6 = Group((6,))
        assert apply_hom(HomMatrix.identity(z6), (4,)) == (4,)
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        assert apply_hom(f, (1,)) == (2,)
        swap = HomMatrix.parse(Group((3, 3)), Group((3, 3)), "0,1;1,0")
        assert apply_hom(swap, (1, 0)) == (0, 1)

    def test_ill_defined(self):
        with pytest.raises(IllDefinedHom):
            HomMatrix(Group((2,)), Group((4,)), ((1,),))
        with pytest.raises(IllDefinedHom):
            HomMatrix(Group((2,)), Group((4,)), ((2, 0),))

    def test_isomorphism_examples(self):
        assert is_isomorphism(HomMatrix.identity(Group((2, 3))))
        assert not is_isomorphism(HomMatrix(Group((2,)), Group((4,)), ((2,),)))
        assert is_isomorphism(HomMatrix(Group((6,)), Group((6,)), ((5,),)))

    def test_isomorphism_matches_image_count(self):
        g = Group((2, 4))
        for rows in oracles.automorphisms(g.moduli):
            assert is_isomorphism(HomMatrix(g, g, rows))
        f = HomMatrix(g, g, ((1, 0), (2, 2)))
        assert not is_isomorphism(f)

    @given(group_and_elements(count=2), st.data())
    def test_additive(self, ge, data):
        g, (a, b) = ge
        cols = []
        for n in g.moduli:
            ok = [c for c in g.elements() if all(n * ci % mi == 0 for ci, mi in zip(c, g.moduli))]
            cols.append(data.draw(st.sampled_from(ok)))
        f = HomMatrix.from_columns(g, g, cols)
        assert f(g.add(a, b)) == g.add(f(a), f(b))
        assert f(a) == oracles.apply(g.moduli, g.moduli, f.entries, a)

    def test_matrix_literal(self):
        assert parse_matrix("1,0;0,1") == ((1, 0), (0, 1))
        assert parse_qz("3/2") == Fraction(1, 2)


class TestAffineClosure:
    def test_examples(self):
        assert affine_closure(Group((2, 2)), [(0, 0)]).members == {(0, 0)}
        assert affine_closure(Group((2, 2)), [(1, 0), (0, 1)]).members == {(1, 0), (0, 1)}
        got = affine_closure(Group((3, 3, 3)), [(0, 1, 1), (2, 0, 2)]).members
        assert got == {(0, 1, 1), (2, 0, 2), (1, 2, 0)}

    def test_empty(self):
        with pytest.raises(EmptyInput):
            affine_closure(Group((2,)), [])

    @given(group_and_elements(count=3, max_order=36))
    def test_matches_oracle_and_idempotent(self, ge):
        g, pts = ge
        s = affine_closure(g, pts).members
        assert s == oracles.affine_closure(g.moduli, pts)
        assert set(pts) <= s
        assert affine_closure(g, sorted(s)).members == s

    @given(group_and_elements(count=3, max_order=36), st.integers(-5, 5))
    def test_closed_under_affine_combinations(self, ge, t):
        g, pts = ge
        s = affine_closure(g, pts).members
        x, y, z = (sorted(s)[i % len(s)] for i in range(3))
        assert g.combine([(t, x), (1 - t, y)]) in s
        assert g.combine([(1, x), (-1, y), (1, z)]) in s

    def test_span(self):
        assert span(Group((6,)), [(2,)]) == {(0,), (2,), (4,)}
