"""Exhaustive verification sweeps over families of small groups.

Each verifier takes one group (or one lens modulus) and returns a list of
counterexamples as JSON-ready dicts; an empty list means every check
passed.  ``run_sweep`` fans the work out over a process pool.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .core import Group, HomMatrix, affine_closure, check_budget, is_isomorphism, max_order
from .duality import (
    HOM_BUDGET,
    analyze_iso,
    annihilator,
    annihilator_group,
    dual_hom,
    isomorphisms,
    monomial_maps,
    preserves_zero_locus,
    transport_hyperplane,
)
from .errors import EnumerationBudgetExceeded, HypersplitError
from .hyperplanes import (
    AffineHyperplane,
    all_nearly_coordinate,
    classify_order2,
    classify_zi_hyperplane,
    coarser_hyperplanes,
    enumerate_zi_hyperplanes,
    hyperplanes_within,
    is_contained_in_zero_locus,
    is_maximal_in_zero_locus,
    is_maximal_within,
    nearly_coordinate,
)
from .signatures import (
    LensSpace,
    SignatureFamily,
    mod2,
    model_signature,
    rho,
    rho_numerators,
    rho_parity,
    signature_values,
)
from .splittings import Splitting, check_standardization, find_splittings_with_union, recover

THEOREMS = (
    "thm1",
    "thm1-upgraded",
    "thm2",
    "thm2-affine",
    "thm-general-case",
    "lemma-max-vile",
    "lemma-ord2",
    "lemma-one-h",
    "lemma-no4",
    "prop-p-group",
    "rho-values",
    "dual-facts",
    "sigprop-c-model",
)


@dataclass(frozen=True)
class SweepConfig:
    max_group_order: int = 64
    moduli_alphabet: tuple[int, ...] = (2, 3, 4, 5)
    max_factors: int = 3
    parallelism: int = 1
    output_format: str = "text"
    max_n: int = 99

    def __post_init__(self) -> None:
        if self.max_factors < 1:
            raise ValueError("max_factors must be at least 1")
        if self.max_group_order > max_order():
            raise EnumerationBudgetExceeded(
                f"max group order {self.max_group_order} exceeds the budget {max_order()}"
            )
        if any(n < 2 for n in self.moduli_alphabet):
            raise ValueError("moduli must be at least 2")
        if self.output_format not in ("text", "json"):
            raise ValueError("output format is text or json")


@dataclass
class VerdictReport:
    theorem: str
    groups_tested: int
    counterexamples: list[dict] = field(default_factory=list)
    wall_time: float = 0.0
    checks: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "verdict": "pass" if self.passed else "fail",
            "groups_tested": self.groups_tested,
            "checks": self.checks,
            "counterexamples": self.counterexamples,
            "wall_time": round(self.wall_time, 4),
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> VerdictReport:
        return cls(
            data["theorem"],
            int(data["groups_tested"]),
            list(data["counterexamples"]),
            float(data["wall_time"]),
            int(data.get("checks", 0)),
            list(data.get("notes", [])),
        )

    def render_text(self) -> str:
        head = (
            f"{self.theorem}: {'PASS' if self.passed else 'FAIL'} "
            f"({self.groups_tested} cases, {self.checks} checks, {self.wall_time:.2f}s)"
        )
        lines = [head]
        lines += [f"  note: {n}" for n in self.notes]
        lines += [f"  counterexample: {c}" for c in self.counterexamples[:20]]
        return "\n".join(lines)


def sweep_groups(alphabet: Iterable[int], max_factors: int, max_order: int) -> list[tuple[int, ...]]:
    """Sorted moduli tuples (multisets) with at most ``max_factors`` factors and bounded order."""
    letters = sorted(set(alphabet))
    out = []
    for k in range(1, max_factors + 1):
        for combo in itertools.combinations_with_replacement(letters, k):
            if math.prod(combo) <= max_order:
                out.append(combo)
    return sorted(out, key=lambda m: (math.prod(m), m))


def _fail(moduli, **info) -> dict:
    return {"moduli": list(moduli), **{k: _jsonable(v) for k, v in info.items()}}


def _jsonable(v):
    if isinstance(v, AffineHyperplane):
        return {"char": list(v.character.coords), "target": str(v.target)}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, HomMatrix):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


# ----------------------------------------------------------- per-group checks
# each returns (number of checks, counterexamples)

def check_thm1(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    if min(moduli) <= 2:
        return 0, []
    found = find_splittings_with_union(g, g.zero_locus_mask)
    if found != [Splitting.coordinate(g)]:
        return 1, [_fail(moduli, splittings=[list(s.hyperplanes) for s in found])]
    return 1, []


def check_thm1_upgraded(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    bad = []
    found = find_splittings_with_union(g, g.zero_locus_mask)
    if Splitting.coordinate(g) not in found:
        bad.append(_fail(moduli, problem="coordinate splitting missing"))
    for s in found:
        try:
            rep = recover(s)
        except HypersplitError as exc:
            bad.append(_fail(moduli, splitting=list(s.hyperplanes), error=repr(exc)))
            continue
        if sorted(rep.quotient_orders) != sorted(moduli) or len(s) != g.rank:
            bad.append(_fail(moduli, splitting=list(s.hyperplanes), problem="quotient orders"))
        for i, n in enumerate(moduli):
            if n > 2 and sum(g.z(i) in h for h in s.hyperplanes) != 1:
                bad.append(_fail(moduli, splitting=list(s.hyperplanes), problem=f"z_{i} witness"))
        for k, h in enumerate(s.hyperplanes):
            if nearly_coordinate(g, rep.nearly_coordinate[rep.order.index(k)]) != h:
                bad.append(_fail(moduli, hyperplane=h, problem="not nearly-coordinate"))
            if not is_maximal_within(h, s.union_mask):
                bad.append(_fail(moduli, hyperplane=h, problem="not maximal in the union"))
        if not check_standardization(s):
            bad.append(_fail(moduli, splitting=list(s.hyperplanes), problem="standardization"))
    return len(found), bad


def _affine_preservers(g: Group, f: HomMatrix) -> list[tuple[int, ...]]:
    """Offsets ``c`` for which ``a -> f(a) + c`` carries the zero locus onto itself."""
    zero_src = (g.array == 0).any(axis=1)
    images = g.array @ f.matrix.T
    moved = (images[None, :, :] + g.array[:, None, :]) % g.moduli_array
    good = ((moved == 0).any(axis=2) == zero_src[None, :]).all(axis=1)
    return [g.element_at(int(i)) for i in np.flatnonzero(good)]


def check_thm2(moduli) -> tuple[int, list[dict]]:
    """Every zero-locus preserving automorphism has block form; monomial maps preserve."""
    g = Group(moduli)
    bad = []
    checks = 0
    ell = sum(1 for n in moduli if n == 2)
    for f in isomorphisms(g, g):
        if not preserves_zero_locus(f):
            continue
        checks += 1
        try:
            rep = analyze_iso(f)
        except HypersplitError as exc:
            bad.append(_fail(moduli, matrix=f, error=repr(exc)))
            continue
        if rep.ell != ell:
            bad.append(_fail(moduli, matrix=f, problem="ell"))
        if ell == 0 and not _is_monomial(f):
            bad.append(_fail(moduli, matrix=f, problem="not monomial"))
    for f in monomial_maps(g):
        checks += 1
        if not preserves_zero_locus(f):
            bad.append(_fail(moduli, matrix=f, problem="monomial map moves the zero locus"))
    return checks, bad


def check_thm2_affine(moduli) -> tuple[int, list[dict]]:
    """Affine automorphisms preserving the zero locus: offset confined to the Z/2 factors?

    The linear part always has block form and each offset coordinate of
    order ``n > 2`` lies in ``{0, n/2}`` (``analyze_iso`` enforces both);
    this verifier additionally tests the stronger claim that those
    coordinates vanish, and reports every map where they do not.
    """
    g = Group(moduli)
    bad = []
    checks = 0
    for f in isomorphisms(g, g):
        for c in _affine_preservers(g, f):
            checks += 1
            try:
                rep = analyze_iso(f, c)
            except HypersplitError as exc:
                bad.append(_fail(moduli, matrix=f, offset=list(c), error=repr(exc)))
                continue
            if not rep.offset_in_z2_block():
                bad.append(_fail(moduli, matrix=f, offset=list(c), problem="offset outside A_2 x 0"))
    return checks, bad


def _is_monomial(f: HomMatrix) -> bool:
    m = np.array(f.entries)
    return bool(np.all((m != 0).sum(axis=0) == 1) and np.all((m != 0).sum(axis=1) == 1))


def check_general_case(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    bad = []
    checks = 0
    for i in range(g.rank):
        for h in enumerate_zi_hyperplanes(g, i):
            checks += 1
            try:
                d = classify_zi_hyperplane(h, i)
                big = nearly_coordinate(g, d)
            except HypersplitError as exc:
                bad.append(_fail(moduli, coordinate=i, hyperplane=h, error=repr(exc)))
                continue
            if h.mask & ~big.mask:
                bad.append(_fail(moduli, coordinate=i, hyperplane=h, problem="not contained"))
            if is_maximal_in_zero_locus(h) != (big == h):
                bad.append(_fail(moduli, coordinate=i, hyperplane=h, problem="maximality"))
    return checks, bad


def _prime_power_base(n: int) -> int | None:
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else None
    return None


def check_p_group(moduli) -> tuple[int, list[dict]]:
    bases = {_prime_power_base(n) for n in moduli}
    if len(bases) != 1 or None in bases:
        return 0, []
    (p,) = bases
    g = Group(moduli)
    bad = []
    checks = 0
    for i, n in enumerate(moduli):
        if n != p:
            continue
        for h in enumerate_zi_hyperplanes(g, i):
            checks += 1
            try:
                d = classify_zi_hyperplane(h, i)
            except HypersplitError as exc:
                bad.append(_fail(moduli, coordinate=i, hyperplane=h, error=repr(exc)))
                continue
            if nearly_coordinate(g, d) != h:
                bad.append(_fail(moduli, coordinate=i, hyperplane=h, problem="containment is strict"))
    return checks, bad


def check_max_vile(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    bad = []
    datas = all_nearly_coordinate(g)
    zmask = g.zero_locus_mask
    inside = hyperplanes_within(g, zmask)
    for d in datas:
        h = nearly_coordinate(g, d)
        if not is_contained_in_zero_locus(h):
            bad.append(_fail(moduli, data=d.to_dict(), problem="escapes the zero locus"))
            continue
        if not is_maximal_in_zero_locus(h):
            bad.append(_fail(moduli, data=d.to_dict(), problem="not maximal"))
        # second route: no hyperplane inside the zero locus strictly contains h
        if any(k.mask != h.mask and h.mask & ~k.mask == 0 for k in inside):
            bad.append(_fail(moduli, data=d.to_dict(), problem="strictly contained (enumeration)"))
    return len(datas), bad


def check_ord2(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    bad = []
    checks = 0
    for h in hyperplanes_within(g, g.zero_locus_mask):
        if h.order != 2:
            continue
        checks += 1
        try:
            d = classify_order2(h)
        except HypersplitError as exc:
            bad.append(_fail(moduli, hyperplane=h, error=repr(exc)))
            continue
        if nearly_coordinate(g, d) != h:
            bad.append(_fail(moduli, hyperplane=h, problem="not reproduced"))
    return checks, bad


def check_one_h(moduli) -> tuple[int, list[dict]]:
    """Any affine subgroup holding ``z_i`` and ``z_j`` holds their closure; it must leave the zero locus."""
    g = Group(moduli)
    bad = []
    checks = 0
    zmask = g.zero_locus_mask
    for i, n in enumerate(moduli):
        if n <= 2:
            continue
        for j in range(g.rank):
            if j == i:
                continue
            checks += 1
            closure = affine_closure(g, [g.z(i), g.z(j)])
            if g.mask_of(closure.members) & ~zmask == 0:
                bad.append(_fail(moduli, i=i, j=j, problem="z_i, z_j share a subgroup inside the zero locus"))
    return checks, bad


def check_no4(moduli) -> tuple[int, list[dict]]:
    """With a Z/4 factor, no ``z``-subgroup inside the zero locus projects onto it."""
    g = Group(moduli)
    bad = []
    checks = 0
    zmask = g.zero_locus_mask
    for i, n in enumerate(moduli):
        if n != 4:
            continue
        for a in g.elements():
            if a[i] % 2 == 0:
                continue
            checks += 1
            closure = affine_closure(g, [g.z(i), a])
            if g.mask_of(closure.members) & ~zmask == 0:
                bad.append(_fail(moduli, i=i, element=list(a), problem="projection onto Z/4"))
    return checks, bad


CHUNK_ENTRIES = 1 << 22


def _adjoint_failures(src: Group, tgt: Group, F: np.ndarray) -> tuple[int, list]:
    """Double dual and ``psi(f a) == (f^v psi)(a)`` for a batch of hom matrices."""
    fails = []
    n = src.moduli_array
    nt = tgt.moduli_array
    D = (n[None, :, None] * np.transpose(F, (0, 2, 1)) // nt[None, None, :]) % n[None, :, None]
    DD = (nt[None, :, None] * np.transpose(D, (0, 2, 1)) // n[None, None, :]) % nt[None, :, None]
    for k in np.flatnonzero(~(DD == F).all(axis=(1, 2)))[:5]:
        fails.append((F[k].tolist(), "double dual"))
    La, Lb = src.exponent, tgt.exponent
    images = np.einsum("na,hba->hnb", src.array, F) % nt  # (H, |A|, rank B)
    left = (images * tgt.level_weights) @ tgt.array.T % Lb  # Lb * psi(f a): (H, |A|, |B|)
    chars = np.einsum("hab,pb->hpa", D, tgt.array) % n  # f^v psi as A-characters: (H, |B|, rank A)
    right = np.einsum("na,hpa->hnp", src.array * src.level_weights, chars) % La
    ok = (left * La - right * Lb) % (La * Lb) == 0
    for k in np.flatnonzero(~ok.all(axis=(1, 2)))[:5]:
        fails.append((F[k].tolist(), "adjointness"))
    return int(ok.size), fails


@functools.lru_cache(maxsize=4096)
def _annihilators(h: AffineHyperplane) -> frozenset:
    return frozenset(c.coords for c in annihilator_group(h))


def check_dual_facts(pair) -> tuple[int, list[dict]]:
    """Adjointness, double dual, and annihilator transport for every hom ``A -> B``."""
    src, tgt = Group(pair[0]), Group(pair[1])
    F = all_hom_arrays(src, tgt)
    bad = []
    checks = 0
    step = max(1, CHUNK_ENTRIES // (src.order * tgt.order))
    for lo in range(0, len(F), step):
        n_checks, fails = _adjoint_failures(src, tgt, F[lo:lo + step])
        checks += n_checks
        bad += [_fail(pair, matrix=m, problem=p) for m, p in fails[: 5 - min(5, len(bad))]]
    # annihilator transport and |C_H| = |A/H'|, on a bounded number of maps
    if src.order * tgt.order <= 144:
        hs = hyperplanes_within(tgt, tgt.full_mask)
        for k in range(len(F)):
            f = HomMatrix(src, tgt, tuple(tuple(int(v) for v in row) for row in F[k]))
            fv = dual_hom(f)
            for h in hs:
                try:
                    J = transport_hyperplane(f, h)
                except HypersplitError:
                    continue
                checks += 1
                members = {a for a in src.elements() if f(a) in h}
                if J.members != members:
                    bad.append(_fail(pair, matrix=f, hyperplane=h, problem="preimage"))
                gen = fv(annihilator(h).coords)
                span = {src.scale(t, gen) for t in range(src.order)}
                if span != _annihilators(J):
                    bad.append(_fail(pair, matrix=f, hyperplane=h, problem="annihilator transport"))
    if src != tgt:
        # the remaining checks depend on the source only; run them once per group
        return checks, bad
    for h in hyperplanes_within(src, src.full_mask):
        checks += 1
        if len(_annihilators(h)) != h.order:
            bad.append(_fail(pair, hyperplane=h, problem="|C_H| != |A/H'|"))
    for d in all_nearly_coordinate(src):
        h = nearly_coordinate(src, d)
        gen = annihilator(h).coords
        j = d.determined
        ok_form = any(
            all(src.scale(u, gen)[i] in ((1,) if i == j else (0, 1) if src.moduli[i] == 2 else (0,))
                for i in range(src.rank))
            for u in range(1, h.order)
            if math.gcd(u, h.order) == 1
        )
        checks += 1
        if not ok_form:
            bad.append(_fail(pair, data=d.to_dict(), problem="annihilator not e_j + A_2 dual"))
    return checks, bad


def all_hom_arrays(src: Group, tgt: Group) -> np.ndarray:
    """Every homomorphism ``src -> tgt`` as an ``(H, rank tgt, rank src)`` array."""
    per_entry = []
    for j, nj in enumerate(tgt.moduli):
        for i, ni in enumerate(src.moduli):
            step = nj // math.gcd(ni, nj)
            per_entry.append(np.arange(0, nj, step))
    check_budget(math.prod(len(e) for e in per_entry), HOM_BUDGET)
    grids = np.meshgrid(*per_entry, indexing="ij")
    flat = np.stack([gr.ravel() for gr in grids], axis=1)
    return flat.reshape(-1, tgt.rank, src.rank).astype(np.int64)


def check_sigprop_model(moduli) -> tuple[int, list[dict]]:
    g = Group(moduli)
    bad = []
    fam = SignatureFamily.model(moduli)
    vals = signature_values(fam)
    zero = (g.array == 0).any(axis=1)
    if not np.array_equal(vals == 0, zero):
        bad.append(_fail(moduli, problem="signature zero locus differs from the zero locus"))
    checks = 1
    for cut in range(1, g.rank):
        left = SignatureFamily.model(moduli[:cut])
        right = SignatureFamily.model(moduli[cut:])
        lv = signature_values(left)
        rv = signature_values(right)
        checks += 1
        if not np.array_equal(np.outer(lv, rv).ravel(), vals):
            bad.append(_fail(moduli, cut=cut, problem="not multiplicative"))
    for n in moduli:
        for j in range(n):
            checks += 1
            if model_signature(n, j) != (1 if j else 0):
                bad.append(_fail(moduli, n=n, j=j, problem="model signature"))
    return checks, bad


def check_rho_values(n: int) -> tuple[int, list[dict]]:
    """Non-vanishing, integrality, and the parity identity for one odd ``n``."""
    bad = []
    checks = 0
    for q in range(1, n):
        if math.gcd(n, q) != 1:
            continue
        lens = LensSpace(n, q)
        nums = rho_numerators(lens)
        checks += n
        zeros = [int(k) for k in np.flatnonzero(nums[1:] == 0) + 1]
        if zeros:
            bad.append({"n": n, "q": q, "vanishing_at": zeros})
        for k in range(1, n):
            # nums[k] / n = -(2k^2 q + n)/n mod 2  <=>  nums[k] + 2k^2 q + n = 0 mod 2n
            if (int(nums[k]) + 2 * k * k * q + n) % (2 * n):
                bad.append({"n": n, "q": q, "k": k, "problem": "parity"})
        if n <= 31:
            # the integer table against the literal rational formula
            for k in range(n):
                value = rho(lens, k)
                if value != Fraction(int(nums[k]), n):
                    bad.append({"n": n, "q": q, "k": k, "problem": "table mismatch"})
                if k and mod2(value) != rho_parity(lens, k):
                    bad.append({"n": n, "q": q, "k": k, "problem": "parity (rational)"})
    return checks, bad


def rho_even_notes(max_n: int) -> list[str]:
    """Even moduli are reported, never certified: where does rho vanish?"""
    notes = []
    for n in range(2, max_n + 1, 2):
        zeros = []
        for q in range(1, n):
            if math.gcd(n, q) != 1:
                continue
            nums = rho_numerators(LensSpace(n, q))
            if np.any(nums[1:] == 0):
                zeros.append(q)
        if zeros:
            notes.append(f"even n={n}: rho vanishes at a nontrivial character for q in {zeros}")
    return notes


# ----------------------------------------------------------------- driver

CHECKS: dict[str, Callable] = {
    "thm1": check_thm1,
    "thm1-upgraded": check_thm1_upgraded,
    "thm2": check_thm2,
    "thm2-affine": check_thm2_affine,
    "thm-general-case": check_general_case,
    "lemma-max-vile": check_max_vile,
    "lemma-ord2": check_ord2,
    "lemma-one-h": check_one_h,
    "lemma-no4": check_no4,
    "prop-p-group": check_p_group,
    "rho-values": check_rho_values,
    "dual-facts": check_dual_facts,
    "sigprop-c-model": check_sigprop_model,
}


def _cases(theorem: str, cfg: SweepConfig) -> list:
    if theorem == "rho-values":
        return list(range(3, cfg.max_n + 1, 2))
    groups = sweep_groups(cfg.moduli_alphabet, cfg.max_factors, cfg.max_group_order)
    if theorem == "thm1":
        return [m for m in groups if min(m) > 2]
    if theorem == "lemma-no4":
        return [m for m in groups if 4 in m]
    if theorem == "sigprop-c-model":
        return [m for m in groups if all(n % 2 for n in m)] or groups
    if theorem == "dual-facts":
        return [(a, b) for a in groups for b in groups]
    return groups


def _run_one(theorem: str, case) -> tuple[int, list[dict]]:
    return CHECKS[theorem](case)


def run_sweep(theorem: str, cfg: SweepConfig) -> VerdictReport:
    if theorem not in CHECKS:
        raise KeyError(f"unknown theorem id {theorem!r}; choose from {', '.join(THEOREMS)}")
    start = time.perf_counter()
    cases = _cases(theorem, cfg)
    workers = max(1, cfg.parallelism)
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, [theorem] * len(cases), cases, chunksize=1))
    else:
        results = [_run_one(theorem, c) for c in cases]
    report = VerdictReport(theorem, len(cases))
    for checks, bad in results:
        report.checks += checks
        report.counterexamples.extend(bad)
    if theorem == "rho-values":
        report.notes.extend(rho_even_notes(cfg.max_n))
    report.wall_time = time.perf_counter() - start
    return report


def default_parallelism() -> int:
    return os.cpu_count() or 1
