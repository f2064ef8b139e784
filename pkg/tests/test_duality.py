from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import moduli
from hypersplit.core import Character, Group, HomMatrix, is_isomorphism
from hypersplit.errors import EmptyPreimage, NotAHyperplane, NotIso, NotZPreserving
from hypersplit.duality import (
    BlockFormReport,
    UnsortedModuli,
    analyze_iso,
    annihilator,
    annihilator_group,
    dual_hom,
    homomorphisms,
    inverse,
    isomorphisms,
    monomial_maps,
    preserves_zero_locus,
    pullback,
    sort_z2_first,
    transport_hyperplane,
)
from hypersplit.hyperplanes import (
    AffineHyperplane,
    coordinate_hyperplane,
    hyperplanes_within,
    vile_hyperplane,
)

# Automorphism counts and zero-locus preserving counts, frozen from the oracle.
AUT_COUNTS = {
    (3, 3): (48, 8, 8),
    (2, 4): (8, 2, 4),
    (2, 2, 2): (168, 24, 168),
    (2, 2, 4): (192, 8, 48),
}


def _swap33():
    g = Group((3, 3))
    return HomMatrix.parse(g, g, "0,1;1,0")


class TestAnnihilator:
    def test_examples(self):
        a = annihilator(coordinate_hyperplane(Group((2, 3)), 0))
        assert (a.coords, a.order) == ((1, 0), 2)
        a = annihilator(vile_hyperplane(1))
        assert (a.coords, a.order) == ((1, 1), 2)
        a = annihilator(AffineHyperplane.of(Group((4, 2)), (1, 1), "1/2"))
        assert (a.coords, a.order) == ((1, 1), 4)

    @pytest.mark.parametrize("m", [(2, 2, 2), (2, 3, 4), (4, 4), (3, 3)])
    def test_annihilator_is_cyclic_of_quotient_order(self, m):
        g = Group(m)
        for h in hyperplanes_within(g, g.full_mask):
            group = annihilator_group(h)
            assert len(group) == h.order
            gen = annihilator(h)
            multiples = {gen.scaled(k).coords for k in range(h.order)}
            assert multiples == {c.coords for c in group}


class TestDualHom:
    def test_examples(self):
        g = Group((2, 3))
        ident = HomMatrix.identity(g)
        assert dual_hom(ident) == ident
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        assert dual_hom(f).entries == ((1,),)
        assert dual_hom(f).source == Group((4,)) and dual_hom(f).target == Group((2,))
        f = HomMatrix(Group((6,)), Group((6,)), ((5,),))
        assert dual_hom(f).entries == ((5,),)

    def test_adjointness_z2_to_z4(self):
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        fv = dual_hom(f)
        pairs = 0
        for a in f.source.elements():
            for psi in f.target.elements():
                lhs = oracles.evaluate(f.source.moduli, fv(psi), a)
                rhs = oracles.evaluate(f.target.moduli, psi, f(a))
                assert lhs == rhs
                pairs += 1
        assert pairs == 8

    @given(moduli(max_order=12, max_factors=2), moduli(max_order=12, max_factors=2), st.data())
    def test_adjoint_and_double_dual(self, ms, mt, data):
        src, tgt = Group(ms), Group(mt)
        homs = list(homomorphisms(src, tgt))
        f = data.draw(st.sampled_from(homs))
        fv = dual_hom(f)
        assert dual_hom(fv) == f
        for a in src.elements():
            for psi in tgt.elements():
                assert oracles.evaluate(ms, fv(psi), a) == oracles.evaluate(mt, psi, f(a))

    def test_homomorphism_count(self):
        # |Hom(Z/m, Z/n)| = gcd(m, n)
        assert len(list(homomorphisms(Group((4,)), Group((6,))))) == 2
        assert len(list(homomorphisms(Group((2, 2)), Group((4,))))) == 4

    def test_pullback(self):
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        psi = Character(Group((4,)), (1,))
        assert pullback(f, psi).coords == (1,)


class TestTransport:
    def test_identity(self):
        g = Group((2, 3, 4))
        ident = HomMatrix.identity(g)
        for h in hyperplanes_within(g, g.zero_locus_mask):
            assert transport_hyperplane(ident, h) == h

    def test_swap(self):
        g = Group((3, 3))
        assert transport_hyperplane(_swap33(), coordinate_hyperplane(g, 0)) == coordinate_hyperplane(g, 1)

    def test_non_surjective(self):
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        j = transport_hyperplane(f, coordinate_hyperplane(Group((4,)), 0))
        assert j.members == {(0,)} and j.character.coords == (1,)

    def test_empty_preimage(self):
        f = HomMatrix(Group((2,)), Group((4,)), ((2,),))
        with pytest.raises(EmptyPreimage):
            transport_hyperplane(f, AffineHyperplane.of(Group((4,)), (1,), "1/4"))

    def test_whole_group(self):
        f = HomMatrix(Group((2,)), Group((2,)), ((0,),))
        with pytest.raises(NotAHyperplane):
            transport_hyperplane(f, coordinate_hyperplane(Group((2,)), 0))

    @pytest.mark.parametrize("ms,mt", [((2, 4), (4, 2)), ((2, 2), (4,)), ((6,), (2, 3)), ((4,), (2, 4))])
    def test_preimage_matches_enumeration(self, ms, mt):
        src, tgt = Group(ms), Group(mt)
        for f in homomorphisms(src, tgt):
            for h in hyperplanes_within(tgt, tgt.full_mask):
                pre = {a for a in src.elements() if f(a) in h}
                try:
                    j = transport_hyperplane(f, h)
                except (EmptyPreimage, NotAHyperplane):
                    assert not pre or pre == set(src.elements())
                    continue
                assert j.members == pre
                gen = annihilator(h)
                image = {dual_hom(f)(gen.scaled(k).coords) for k in range(gen.order)}
                assert {annihilator(j).scaled(k).coords for k in range(j.order)} == image


class TestPreservation:
    def test_examples(self):
        g = Group((3, 3))
        assert preserves_zero_locus(HomMatrix.identity(g))
        assert preserves_zero_locus(_swap33())
        shear = HomMatrix.parse(g, g, "1,0;1,1")
        assert shear((1, 0)) == (1, 1)
        assert not preserves_zero_locus(shear)

    def test_not_iso(self):
        g = Group((3, 3))
        with pytest.raises(NotIso):
            preserves_zero_locus(HomMatrix.parse(g, g, "1,0;0,0"))

    @pytest.mark.parametrize("m", sorted(AUT_COUNTS))
    def test_counts_match_oracle(self, m):
        g = Group(m)
        auts, linear, affine = AUT_COUNTS[m]
        isos = list(isomorphisms(g, g))
        assert len(isos) == auts
        assert {f.entries for f in isos} == set(oracles.automorphisms(m))
        keep = [f for f in isos if preserves_zero_locus(f)]
        assert len(keep) == linear
        for f in isos:
            assert preserves_zero_locus(f) == oracles.preserves_zero_locus(m, f.entries)
        pairs = sum(1 for f in isos for c in g.elements() if preserves_zero_locus(f, c))
        assert pairs == affine

    @pytest.mark.parametrize("m", [(3, 3), (2, 4), (2, 3, 4), (2, 2, 3)])
    def test_monomial_converse(self, m):
        for f in monomial_maps(Group(m)):
            assert preserves_zero_locus(f)

    def test_inverse(self):
        g = Group((2, 4))
        for f in isomorphisms(g, g):
            assert f.compose(inverse(f)) == HomMatrix.identity(g)


class TestAnalyzeIso:
    def test_identity(self):
        rep = analyze_iso(HomMatrix.identity(Group((3, 5))))
        assert rep.perm == (0, 1) and rep.diag == (1, 1) and rep.ell == 0

    def test_swap(self):
        rep = analyze_iso(_swap33())
        assert rep.perm == (1, 0) and rep.diag == (1, 1) and rep.is_monomial()

    def test_z2_z4_sweep(self):
        g = Group((2, 4))
        seen = set()
        for f in isomorphisms(g, g):
            if not preserves_zero_locus(f):
                continue
            rep = analyze_iso(f)
            assert rep.ell == 1 and rep.f11 == ((1,),)
            seen.add(rep.diag)
        assert seen == {(1,), (3,)}

    def test_not_preserving(self):
        g = Group((3, 3))
        with pytest.raises(NotZPreserving):
            analyze_iso(HomMatrix.parse(g, g, "1,0;1,1"))

    def test_unsorted(self):
        g = Group((4, 2))
        with pytest.raises(UnsortedModuli):
            analyze_iso(HomMatrix.identity(g))
        assert sort_z2_first(g).moduli == (2, 4)

    def test_cross_group(self):
        src, tgt = Group((2, 3, 5)), Group((2, 5, 3))
        f = HomMatrix.parse(src, tgt, "1,0,0;0,0,2;0,1,0")
        rep = analyze_iso(f)
        assert rep.perm == (0, 2, 1) and rep.diag == (1, 2)

    @pytest.mark.parametrize("m", [(2, 2, 2), (2, 2, 4), (2, 3, 3), (3, 4)])
    def test_block_form_reconstructs(self, m):
        g = Group(m)
        for f in isomorphisms(g, g):
            if not preserves_zero_locus(f):
                continue
            rep = analyze_iso(f)
            ell = rep.ell
            assert ell == sum(1 for n in m if n == 2)
            rows = [f.entries[rep.perm[k]] for k in range(g.rank)]
            for k in range(ell):
                assert tuple(rows[k][:ell]) == rep.f11[k]
                assert not any(rows[k][ell:])
            for k in range(ell, g.rank):
                assert tuple(rows[k][:ell]) == rep.f21[k - ell]
                off = [rows[k][i] for i in range(ell, g.rank) if i != k]
                assert not any(off)
                assert rows[k][k] == rep.diag[k - ell]

    def test_affine_offset_outside_z2_block(self):
        # (x, y) -> (x, 2x + y + 2) preserves the zero locus of Z/2 x Z/4
        g = Group((2, 4))
        f = HomMatrix.parse(g, g, "1,0;2,1")
        assert preserves_zero_locus(f, (0, 2))
        assert oracles.preserves_zero_locus((2, 4), f.entries, (0, 2))
        rep = analyze_iso(f, (0, 2))
        assert rep.offset == (0, 2)
        assert not rep.offset_in_z2_block()

    @pytest.mark.parametrize("m", [(2, 4), (2, 2, 4), (3, 3), (2, 3)])
    def test_affine_offsets_halfway(self, m):
        g = Group(m)
        for f in isomorphisms(g, g):
            for c in g.elements():
                if preserves_zero_locus(f, c):
                    rep = analyze_iso(f, c)
                    for cj, n in zip(c, m):
                        assert n == 2 or 2 * cj % n == 0
                    assert rep.offset == c

    def test_report_roundtrip(self):
        g = Group((2, 2, 4))
        for f in itertools.islice((f for f in isomorphisms(g, g) if preserves_zero_locus(f)), 4):
            rep = analyze_iso(f)
            assert BlockFormReport.from_dict(json.loads(json.dumps(rep.to_dict()))) == rep
        rep = analyze_iso(HomMatrix.parse(Group((2, 4)), Group((2, 4)), "1,0;2,1"), (0, 2))
        assert BlockFormReport.from_dict(json.loads(json.dumps(rep.to_dict()))) == rep
        assert set(analyze_iso(_swap33()).to_dict()) == {"ell", "perm", "moduli", "diag", "f11", "f21"}

    def test_isomorphism_flag(self):
        g = Group((2, 4))
        assert all(is_isomorphism(f) for f in isomorphisms(g, g))
