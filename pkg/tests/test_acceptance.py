"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import math
import time
from fractions import Fraction

import pytest

from hypersplit.cli import main
from hypersplit.core import Group, affine_closure
from hypersplit.errors import NotAHyperplane
from hypersplit.hyperplanes import (
    AffineHyperplane,
    coordinate_hyperplane,
    hyperplane_from_members,
    vile_hyperplane,
    zero_locus,
)
from hypersplit.signatures import LensSpace, RhoTable, SignatureFamily, model_signature, rho, signature_zero_locus
from hypersplit.splittings import Splitting, find_splittings_with_union, recover
from hypersplit.verify import SweepConfig, run_sweep


@pytest.fixture
def verdict(capsys):
    def emit(label: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[acceptance] {label}: {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
        assert ok, detail

    return emit


def test_c1_rho_exact_values(verdict, capsys):
    timings = []
    values = []
    for n, q, k in [(6, 1, 3), (8, 1, 2)]:
        lens = LensSpace(n, q)
        rho(lens, k)
        start = time.perf_counter()
        v = rho(lens, k)
        timings.append(time.perf_counter() - start)
        values.append(v)
        assert main(["rho", "--n", str(n), "--q", str(q), "--k", str(k)]) == 0
        assert capsys.readouterr().out.strip() == "2"
    ok = values == [Fraction(2), Fraction(2)] and max(timings) < 1e-3
    verdict("1 rho(6,1,3) = rho(8,1,2) = 2", ok, f"values {values}, max {max(timings) * 1e6:.1f} us")


def _rational_table(n: int, q: int) -> list[Fraction]:
    """The closed formula with Fractions, accumulating the floor sum incrementally."""
    out = [Fraction(0)]
    floors = 0
    for k in range(1, n):
        out.append(Fraction(-2 * q * k * k, n) + 2 * k - 1 + 2 * (k * q // n) + 4 * floors)
        floors += k * q // n
    return out


def test_c2_odd_nonvanishing_sweep(verdict):
    start = time.perf_counter()
    report = run_sweep("rho-values", SweepConfig(parallelism=1, max_n=199))
    problems = list(report.counterexamples)
    lenses = 0
    for n in range(3, 200, 2):
        for q in range(1, n):
            if math.gcd(n, q) != 1:
                continue
            lenses += 1
            table = RhoTable.compute(LensSpace(n, q)).values
            exact = _rational_table(n, q)
            if list(table) != exact or exact[0] != 0:
                problems.append((n, q, "table"))
            if any((n * v).denominator != 1 for v in exact):
                problems.append((n, q, "n*rho not integral"))
            if any(v == 0 for v in exact[1:]):
                problems.append((n, q, "vanishes"))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    verdict("2 rho nonvanishing for odd n <= 199", ok, f"{lenses} lens spaces, {elapsed:.1f}s, {len(problems)} problems")


def test_c3_coordinate_splitting_unique(verdict):
    cfg = SweepConfig(max_group_order=320, moduli_alphabet=(3, 4, 5, 7, 9), max_factors=3, parallelism=4)
    report = run_sweep("thm1", cfg)
    ok = report.passed and report.wall_time < 600
    verdict("3 only the coordinate splitting (moduli > 2)", ok, report.render_text().splitlines()[0])


def test_c4_splittings_with_two_torsion(verdict):
    cfg = SweepConfig(max_group_order=96, moduli_alphabet=(2, 3, 4), max_factors=4)
    report = run_sweep("thm1-upgraded", cfg)
    g = Group((2, 2, 2))
    found = find_splittings_with_union(g, g.zero_locus_mask)
    odd_one = Splitting(g, (coordinate_hyperplane(g, 0), coordinate_hyperplane(g, 1), AffineHyperplane.of(g, (1, 1, 1))))
    rep = recover(odd_one)
    positive = (
        odd_one in found
        and odd_one != Splitting.coordinate(g)
        and sorted(rep.quotient_orders) == [2, 2, 2]
        and any(d.phi_support for d in rep.nearly_coordinate)
    )
    ok = report.passed and positive
    verdict("4 splittings are nearly-coordinate", ok, report.render_text().splitlines()[0] + f"; (Z/2)^3 instance {positive}")


def test_c5_z0_hyperplane_classification(verdict):
    cfg = SweepConfig(max_group_order=64, moduli_alphabet=(2, 3, 4, 5), max_factors=6)
    general = run_sweep("thm-general-case", cfg)
    pgroup = run_sweep("prop-p-group", cfg)
    ok = general.passed and pgroup.passed and general.checks > 0 and pgroup.checks > 0
    detail = f"{general.render_text().splitlines()[0]}; {pgroup.render_text().splitlines()[0]}"
    verdict("5 z_0-hyperplanes sit in nearly-Z_0 hyperplanes", ok, detail)


def test_c6_preserving_automorphisms(verdict):
    cfg = SweepConfig(max_group_order=60, moduli_alphabet=(2, 3, 4, 5), max_factors=3)
    report = run_sweep("thm2", cfg)
    verdict("6 zero-locus preserving automorphisms have block form", report.passed, report.render_text().splitlines()[0])


def test_c7_dual_adjointness(verdict):
    cfg = SweepConfig(max_group_order=36, moduli_alphabet=tuple(range(2, 37)), max_factors=4)
    report = run_sweep("dual-facts", cfg)
    verdict("7 dual adjointness and double dual", report.passed, report.render_text().splitlines()[0])


def test_c8_model_signatures(verdict):
    bad = [(n, j) for n in range(2, 31) for j in range(n) if model_signature(n, j, tol=1e-6) != (1 if j else 0)]
    zl = signature_zero_locus(SignatureFamily.model([3, 5, 7]))
    ok = not bad and zl == zero_locus(Group((3, 5, 7))) and len(zl) == 57
    verdict("8 model signatures and product zero locus", ok, f"{len(bad)} bad (n, j); |zero locus| = {len(zl)}")


REFERENCE_Z5 = {(0, 1, 1, 1, 1), (4, 0, 3, 4, 2), (3, 4, 0, 1, 3), (2, 3, 2, 0, 4), (1, 2, 4, 3, 0)}


def _rescaled_shifts(n: int, scale: tuple[int, ...]) -> set[tuple[int, ...]]:
    """Cyclic shifts of (0, 1, ..., n-1), multiplied coordinatewise by ``scale``."""
    base = tuple(range(n))
    return {tuple(base[(i - s) % n] * scale[i] % n for i in range(n)) for s in range(n)}


def _is_rejected(g: Group, pts) -> bool:
    try:
        hyperplane_from_members(g, pts)
    except NotAHyperplane:
        return True
    return False


def test_c9_set_pieces(verdict):
    v1 = vile_hyperplane(1).members == {(1, 0), (0, 1)}
    v2 = vile_hyperplane(2).members == {(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)}
    g3 = Group((3, 3, 3))
    closure = affine_closure(g3, [(0, 1, 1), (2, 0, 2)]).members == {(0, 1, 1), (2, 0, 2), (1, 2, 0)}
    closure = closure and _rescaled_shifts(3, (1, 1, 2)) == {(0, 1, 1), (2, 0, 2), (1, 2, 0)}

    # The reference (Z/5)^5 set is the rescaled cyclic-shift construction with one
    # wrong entry: (3, 4, 0, 1, 3) stands for (3, 4, 0, 2, 3).
    g5 = Group((5,) * 5)
    built = _rescaled_shifts(5, (1, 1, 3, 2, 4))
    misprint = REFERENCE_Z5 - built == {(3, 4, 0, 1, 3)} and built - REFERENCE_Z5 == {(3, 4, 0, 2, 3)}
    inside = built <= zero_locus(g5) and REFERENCE_Z5 <= zero_locus(g5)
    affine = affine_closure(g5, sorted(built)).members == built and len(built) == 5
    reference_not_affine = len(affine_closure(g5, sorted(REFERENCE_Z5)).members) == 25
    rejected = _is_rejected(g5, built) and _is_rejected(g5, REFERENCE_Z5)
    ok = all([v1, v2, closure, misprint, inside, affine, reference_not_affine, rejected])
    detail = (
        f"V1 {v1}, V2 {v2}, (Z/3)^3 closure {closure}; (Z/5)^5 set inside {inside}, affine {affine}, "
        f"rejected {rejected}; reference copy differs only by the entry (3,4,0,1,3) -> (3,4,0,2,3): {misprint}"
    )
    verdict("9 set pieces reproduced", ok, detail)
