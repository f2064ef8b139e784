"""Hyperplane splittings and recovery of a splitting from its union.

A splitting of ``A`` is an unordered collection of affine hyperplanes
``H_k`` such that ``a -> (a + H'_k)_k`` is an isomorphism onto
``prod A / H'_k``.  Splittings are stored with their hyperplanes sorted
canonically, so two splittings are equal iff they are equal as sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Element, Group, HomMatrix, is_isomorphism, mask_indices
from .errors import GroupMismatch, HypothesisFailure, TheoremViolation, UnionMismatch
from .hyperplanes import (
    AffineHyperplane,
    NearlyCoordinateData,
    classify_order2,
    classify_zi_hyperplane,
    coordinate_hyperplane,
    hyperplanes_within,
    is_contained_in_zero_locus,
    maximal_elements,
    nearly_coordinate,
    require_same_group,
)


class NotASplitting(HypothesisFailure):
    pass


def _kernels_split(g: Group, hs: Sequence[AffineHyperplane]) -> bool:
    total = 1
    for h in hs:
        total *= h.order
    if total != g.order:
        return False
    common = g.full_mask
    for h in hs:
        common &= h.linear().mask
    return common == 1  # only the zero element, which has index 0


def is_splitting(g: Group, hs: Iterable[AffineHyperplane]) -> bool:
    hs = list(hs)
    require_same_group(g, hs)
    return _kernels_split(g, hs)


def member_key(h: AffineHyperplane) -> tuple:
    """Descending character order, so ``Z_0, Z_1, ...`` keep their coordinate order."""
    return (tuple(-x for x in h.character.coords), h.target)


@dataclass(frozen=True)
class Splitting:
    group: Group
    hyperplanes: tuple[AffineHyperplane, ...]

    def __post_init__(self) -> None:
        hs = tuple(sorted(self.hyperplanes, key=member_key))
        require_same_group(self.group, hs)
        if not _kernels_split(self.group, hs):
            raise NotASplitting("induced map to the product of quotients is not an isomorphism")
        object.__setattr__(self, "hyperplanes", hs)

    @classmethod
    def coordinate(cls, g: Group) -> Splitting:
        return cls(g, tuple(coordinate_hyperplane(g, i) for i in range(g.rank)))

    @property
    def union_mask(self) -> int:
        m = 0
        for h in self.hyperplanes:
            m |= h.mask
        return m

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(h.order for h in self.hyperplanes)

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.group.moduli),
            "hyperplanes": [
                {k: v for k, v in h.to_dict().items() if k != "moduli"} for h in self.hyperplanes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Splitting:
        g = Group(tuple(data["moduli"]))
        return cls(g, tuple(AffineHyperplane.from_dict(h, g) for h in data["hyperplanes"]))


def union(s: Splitting) -> frozenset[Element]:
    return s.group.elements_of(s.union_mask)


def find_splittings_with_union(
    g: Group, target: Iterable[Element] | int, prune_to_maximal: bool = True
) -> list[Splitting]:
    """Every splitting of ``g`` whose union is exactly ``target``.

    Candidates are the affine hyperplanes inside ``target``; by default only
    those maximal there are kept, since each member of a splitting is
    maximal inside the union.  The search covers the first uncovered target
    element at each step and keeps the running intersection of linear
    translates of the exact size a splitting forces.
    """
    tmask = target if isinstance(target, int) else g.mask_of(target)
    cands = hyperplanes_within(g, tmask)
    if prune_to_maximal:
        cands = maximal_elements(cands)
    lin = [h.linear().mask for h in cands]
    masks = [h.mask for h in cands]
    found: set[tuple[int, ...]] = set()

    def extend(chosen: list[int], covered: int, common: int, size: int) -> None:
        if covered == tmask:
            if size == 1:
                found.add(tuple(sorted(chosen)))
            return
        if size == 1:
            return
        uncovered = tmask & ~covered
        first = uncovered & -uncovered
        for k, h in enumerate(cands):
            if not masks[k] & first or k in chosen:
                continue
            if size % h.order:
                continue
            nxt = common & lin[k]
            if nxt.bit_count() * h.order != size:
                continue
            chosen.append(k)
            extend(chosen, covered | masks[k], nxt, size // h.order)
            chosen.pop()

    extend([], 0, g.full_mask, g.order)
    out = [Splitting(g, tuple(cands[k] for k in combo)) for combo in found]
    return sorted(out, key=lambda s: [h.sort_key() for h in s.hyperplanes])


def affine_standardization(s: Splitting) -> tuple[HomMatrix, Element]:
    """The affine isomorphism ``a -> pi(a) + c`` onto ``prod Z/d_k`` sending ``H_k`` to ``Z_k``."""
    g = s.group
    target = Group(s.orders)
    rows = []
    offset = []
    for h in s.hyperplanes:
        d = h.order
        rows.append(
            tuple(x * d // n for x, n in zip(h.character.coords, g.moduli))
        )
        offset.append(-h.level % d)
    return HomMatrix(g, target, tuple(rows)), tuple(offset)


def check_standardization(s: Splitting) -> bool:
    pi, c = affine_standardization(s)
    if not is_isomorphism(pi):
        return False
    tg = pi.target
    for k, h in enumerate(s.hyperplanes):
        image = {tg.add(pi(a), c) for a in h.members}
        if image != coordinate_hyperplane(tg, k).members:
            return False
    return True


# ------------------------------------------------------------------ recovery

@dataclass(frozen=True)
class RecoveryReport:
    """Structure of a splitting whose union is the zero locus.

    Entries are listed in report order: quotient orders descending, ties by
    determined coordinate.  ``order[k]`` is the splitting index of entry
    ``k``; ``permutation`` maps splitting index to coordinate.
    """

    moduli: tuple[int, ...]
    order: tuple[int, ...]
    permutation: dict[int, int] = field(hash=False)
    nearly_coordinate: tuple[NearlyCoordinateData, ...]
    quotient_orders: tuple[int, ...]
    z_witnesses: dict[int, Element] = field(hash=False)

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "order": list(self.order),
            "permutation": {str(k): v for k, v in sorted(self.permutation.items())},
            "nearly_coordinate": [d.to_dict() for d in self.nearly_coordinate],
            "quotient_orders": list(self.quotient_orders),
            "z_witnesses": {str(i): list(z) for i, z in sorted(self.z_witnesses.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> RecoveryReport:
        return cls(
            tuple(data["moduli"]),
            tuple(data["order"]),
            {int(k): int(v) for k, v in data["permutation"].items()},
            tuple(NearlyCoordinateData.from_dict(d) for d in data["nearly_coordinate"]),
            tuple(data["quotient_orders"]),
            {int(k): tuple(v) for k, v in data["z_witnesses"].items()},
        )


def least_matching(options: Sequence[Iterable[int]]) -> list[int] | None:
    """Lexicographically least system of distinct representatives, or None."""
    opts = [sorted(set(o)) for o in options]

    def completable(start: int, used: set[int]) -> bool:
        owner: dict[int, int] = {}

        def augment(k: int, seen: set[int]) -> bool:
            for j in opts[k]:
                if j in used or j in seen:
                    continue
                seen.add(j)
                if j not in owner or augment(owner[j], seen):
                    owner[j] = k
                    return True
            return False

        return all(augment(k, set()) for k in range(start, len(opts)))

    chosen: list[int] = []
    used: set[int] = set()
    for k, row in enumerate(opts):
        for j in row:
            if j in used:
                continue
            used.add(j)
            if completable(k + 1, used):
                chosen.append(j)
                break
            used.discard(j)
        else:
            return None
    return chosen


def recover(s: Splitting) -> RecoveryReport:
    """Match every hyperplane of ``s`` to a coordinate it is nearly-coordinate for."""
    g = s.group
    hs = s.hyperplanes
    if s.union_mask != g.zero_locus_mask:
        raise UnionMismatch("the splitting's union is not the zero locus")
    if len(hs) != g.rank:
        raise TheoremViolation(f"{len(hs)} hyperplanes split a group with {g.rank} factors")

    assigned: dict[int, int] = {}
    data: dict[int, NearlyCoordinateData] = {}
    witnesses: dict[int, Element] = {}
    for i, n in enumerate(g.moduli):
        if n <= 2:
            continue
        z = g.z(i)
        holders = [k for k, h in enumerate(hs) if z in h]
        if len(holders) != 1 or holders[0] in assigned:
            raise TheoremViolation(f"z_{i} lies in splitting members {holders}")
        k = holders[0]
        d = classify_zi_hyperplane(hs[k], i)
        if nearly_coordinate(g, d) != hs[k]:
            raise TheoremViolation(f"{hs[k]!r} is strictly inside a nearly-Z_{i} hyperplane")
        assigned[k] = i
        data[k] = d
        witnesses[i] = z

    rest = [k for k in range(len(hs)) if k not in assigned]
    free = {i for i, n in enumerate(g.moduli) if n == 2}
    for k in rest:
        if hs[k].order != 2:
            raise TheoremViolation(f"unmatched member {hs[k]!r} has quotient order {hs[k].order}")
    options = [
        [i for i, x in enumerate(hs[k].character.coords) if x and i in free] for k in rest
    ]
    match = least_matching(options)
    if match is None:
        raise TheoremViolation("order-2 members cannot be matched to Z/2 coordinates")
    for k, j in zip(rest, match):
        assigned[k] = j
        data[k] = classify_order2(hs[k], determined=j)

    for k, i in assigned.items():
        if hs[k].order != g.moduli[i]:
            raise TheoremViolation(f"quotient order {hs[k].order} at coordinate {i} of {g}")
        if not is_contained_in_zero_locus(hs[k]):
            raise TheoremViolation(f"{hs[k]!r} escapes the zero locus")

    ordering = sorted(range(len(hs)), key=lambda k: (-hs[k].order, data[k].determined))
    return RecoveryReport(
        moduli=g.moduli,
        order=tuple(ordering),
        permutation=dict(sorted(assigned.items())),
        nearly_coordinate=tuple(data[k] for k in ordering),
        quotient_orders=tuple(hs[k].order for k in ordering),
        z_witnesses=witnesses,
    )


def splitting_indices(mask: int) -> list[int]:
    return mask_indices(mask)


def require_group(g: Group, s: Splitting) -> None:
    if s.group != g:
        raise GroupMismatch("splitting over a different group")
