"""Affine hyperplanes, the zero locus, and nearly-coordinate hyperplanes.

An affine hyperplane is a nonempty fiber ``phi^{-1}(c)`` of a nontrivial
character.  Two pairs ``(phi, c)`` give the same set exactly when the
characters generate the same cyclic subgroup of the dual and the targets
correspond, so every hyperplane is stored with the lexicographically least
generator of ``<phi>``; equality of hyperplanes is then structural.

The zero locus of ``A = prod Z/n_i`` is the set of elements with at least
one zero coordinate, the union of the coordinate hyperplanes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Character,
    Element,
    Group,
    affine_closure,
    basis_character,
    check_budget,
    divisors,
    flags_from_mask,
    format_ints,
    mod1,
    parse_ints,
    parse_qz,
    units,
)
from .errors import (
    BadInflation,
    BadSupport,
    ClassificationFailure,
    GroupMismatch,
    HypothesisFailure,
    NotAHyperplane,
    NotInZeroLocus,
    NotZ0Hyperplane,
)


@dataclass(frozen=True)
class AffineHyperplane:
    """The fiber ``character^{-1}(target)``, kept in canonical form."""

    character: Character
    target: Fraction

    def __post_init__(self) -> None:
        phi = self.character
        if phi.is_trivial:
            raise NotAHyperplane("the trivial character has no proper fibers")
        t = mod1(self.target)
        d = phi.order
        if (t * d).denominator != 1:
            raise NotAHyperplane(f"{t} is not a value of a character of order {d}")
        best = None
        for u in units(d):
            cand = (phi.group.scale(u, phi.coords), mod1(u * t))
            if best is None or cand < best:
                best = cand
        object.__setattr__(self, "character", Character(phi.group, best[0]))
        object.__setattr__(self, "target", best[1])

    @classmethod
    def of(cls, g: Group, coords: Iterable[int], target: Fraction | int | str = 0) -> AffineHyperplane:
        t = parse_qz(target) if isinstance(target, str) else Fraction(target)
        return cls(Character(g, tuple(coords)), t)

    @property
    def group(self) -> Group:
        return self.character.group

    @property
    def order(self) -> int:
        """Order of the cyclic quotient ``A / H'``."""
        return self.character.order

    @property
    def level(self) -> int:
        return int(self.target * self.order)

    @property
    def size(self) -> int:
        return self.group.order // self.order

    def sort_key(self) -> tuple:
        return (self.character.coords, self.target)

    def __lt__(self, other: AffineHyperplane) -> bool:
        return self.sort_key() < other.sort_key()

    def __contains__(self, a: Element) -> bool:
        return self.character.level(self.group.check(a)) == self.level

    @cached_property
    def mask(self) -> int:
        g = self.group
        lv = g.levels(self.character.coords)[:, 0]
        return g.mask(lv == self.level * (g.exponent // self.order))

    @cached_property
    def members(self) -> frozenset[Element]:
        return self.group.elements_of(self.mask)

    def linear(self) -> AffineHyperplane:
        return AffineHyperplane(self.character, Fraction(0))

    @cached_property
    def basepoint(self) -> Element:
        return self.group.element_at((self.mask & -self.mask).bit_length() - 1)

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.group.moduli),
            "char": format_ints(self.character.coords),
            "target": str(self.target),
        }

    @classmethod
    def from_dict(cls, data: dict, group: Group | None = None) -> AffineHyperplane:
        g = group if group is not None else Group(tuple(data["moduli"]))
        return cls.of(g, parse_ints(data["char"]), str(data["target"]))

    def __repr__(self) -> str:
        return f"AffineHyperplane({self.group.moduli}, char={self.character.coords}, target={self.target})"


def hyperplane_from_members(g: Group, points: Iterable[Element]) -> AffineHyperplane:
    """The affine hyperplane equal to ``points``.

    Raises NotAHyperplane unless the set is an affine subgroup whose
    linear translate is proper with cyclic quotient.
    """
    pts = frozenset(g.check(tuple(p)) for p in points)
    closure = affine_closure(g, sorted(pts))
    if closure.members != pts:
        raise NotAHyperplane("the set is not an affine subgroup")
    q = closure.index
    if q == 1:
        raise NotAHyperplane("the whole group is not a hyperplane")
    for chi in closure.annihilator():
        if chi.order == q:
            return AffineHyperplane(chi, chi(closure.basepoint))
    raise NotAHyperplane(f"quotient of order {q} is not cyclic")


# --------------------------------------------------------------- zero locus

def zero_locus(g: Group) -> frozenset[Element]:
    check_budget(g.order)
    return g.elements_of(g.zero_locus_mask)


def coordinate_hyperplane(g: Group, i: int) -> AffineHyperplane:
    return AffineHyperplane(basis_character(g, i), Fraction(0))


def members(h: AffineHyperplane) -> frozenset[Element]:
    return h.members


def vile_hyperplane(m: int) -> AffineHyperplane:
    """``V_m = {x in (Z/2)^{m+1} : x_0 + ... + x_m = m}``."""
    if m < 1:
        raise ValueError("V_m needs m >= 1")
    g = Group((2,) * (m + 1))
    return AffineHyperplane(Character(g, (1,) * (m + 1)), Fraction(m, 2))


def is_contained_in_zero_locus(h: AffineHyperplane) -> bool:
    return h.mask & ~h.group.zero_locus_mask == 0


def coarser_hyperplanes(h: AffineHyperplane) -> list[AffineHyperplane]:
    """Every affine hyperplane strictly containing ``h``.

    A hyperplane containing ``h`` has annihilator inside the cyclic group
    ``<phi>``, so it is the fiber through ``h`` of ``(d/e) phi`` for a
    proper divisor ``e > 1`` of ``d = order(phi)``.
    """
    d = h.order
    base = h.basepoint
    out = []
    for e in divisors(d)[1:-1]:
        psi = h.character.scaled(d // e)
        out.append(AffineHyperplane(psi, psi(base)))
    return out


def is_maximal_within(h: AffineHyperplane, mask: int) -> bool:
    return all(big.mask & ~mask for big in coarser_hyperplanes(h))


def is_maximal_in_zero_locus(h: AffineHyperplane) -> bool:
    if not is_contained_in_zero_locus(h):
        raise NotInZeroLocus(f"{h!r} is not contained in the zero locus")
    return is_maximal_within(h, h.group.zero_locus_mask)


# ------------------------------------------------------ bulk enumeration

@lru_cache(maxsize=64)
def canonical_characters(g: Group) -> np.ndarray:
    """Coordinates of the canonical generator of every nontrivial cyclic subgroup of the dual."""
    arr = g.array
    best = np.full(g.order, g.order, dtype=np.int64)
    for u in units(g.exponent):
        idx = (arr * u % g.moduli_array) @ g.stride_array
        np.minimum(best, idx, out=best)
    own = np.arange(g.order)
    keep = (best == own) & (own != 0)
    return arr[keep]


def _character_orders(g: Group, chars: np.ndarray) -> np.ndarray:
    mods = g.moduli_array
    per = mods // np.gcd(chars, mods)
    return np.lcm.reduce(per, axis=1)


def hyperplanes_within(
    g: Group, mask: int, through: Element | None = None
) -> list[AffineHyperplane]:
    """All affine hyperplanes contained in the set ``mask`` (optionally through a point)."""
    chars = canonical_characters(g)
    if len(chars) == 0:
        return []
    L = g.exponent
    levels = g.levels(chars)
    outside = ~flags_from_mask(mask, g.order)
    orders = _character_orders(g, chars)
    found = []
    if through is not None:
        t = levels[g.index(g.check(through))]
        blocked = (levels[outside] == t).any(axis=0)
        for c in np.flatnonzero(~blocked):
            found.append(_hyperplane_from_level(g, chars[c], int(t[c]), L))
    else:
        hit = np.zeros((len(chars), L), dtype=bool)
        cols = np.broadcast_to(np.arange(len(chars)), levels[outside].shape)
        hit[cols, levels[outside]] = True
        for c in range(len(chars)):
            step = L // int(orders[c])
            for lv in range(0, L, step):
                if not hit[c, lv]:
                    found.append(_hyperplane_from_level(g, chars[c], lv, L))
    return sorted(found)


def _hyperplane_from_level(g: Group, coords: np.ndarray, level: int, L: int) -> AffineHyperplane:
    return AffineHyperplane(Character(g, tuple(int(x) for x in coords)), Fraction(level, L))


def maximal_elements(hs: Sequence[AffineHyperplane]) -> list[AffineHyperplane]:
    """Hyperplanes not strictly contained in another member of ``hs`` (by set inclusion)."""
    keep: list[AffineHyperplane] = []
    for h in sorted(hs, key=lambda h: (-h.size, h.sort_key())):
        if not any(h.mask & ~k.mask == 0 for k in keep):
            keep.append(h)
    return sorted(keep)


def enumerate_zi_hyperplanes(g: Group, i: int) -> list[AffineHyperplane]:
    return hyperplanes_within(g, g.zero_locus_mask, through=g.z(i))


def enumerate_z0_hyperplanes(g: Group) -> list[AffineHyperplane]:
    return enumerate_zi_hyperplanes(g, 0)


# ------------------------------------------------- nearly-coordinate data

def default_inflation(n: int) -> int:
    """``r`` with ``n = 2r``; for odd ``n`` (coordinate hyperplanes only) ``r = n``."""
    return n // 2 if n % 2 == 0 else n


@dataclass(frozen=True)
class NearlyCoordinateData:
    """A nearly-``Z_j`` hyperplane ``x_j = r (phi(rest) + phi(1))``.

    ``phi`` sends ``e_i`` to 1 in Z/2 exactly for ``i`` in ``phi_support``
    (all of which must be Z/2 factors); ``independent`` lists the other
    coordinates besides ``determined``.
    """

    determined: int
    inflation: int
    phi_support: tuple[int, ...]
    independent: tuple[int, ...]

    @classmethod
    def build(
        cls, g: Group, determined: int, support: Iterable[int] = (), inflation: int | None = None
    ) -> NearlyCoordinateData:
        support = tuple(sorted(set(support)))
        r = default_inflation(g.moduli[determined]) if inflation is None else inflation
        rest = tuple(i for i in range(g.rank) if i != determined and i not in support)
        return cls(determined, r, support, rest)

    def phi_character(self, g: Group) -> Character:
        return Character(g, tuple(1 if i in self.phi_support else 0 for i in range(g.rank)))

    def to_dict(self) -> dict:
        return {
            "determined": self.determined,
            "inflation": self.inflation,
            "phi_support": list(self.phi_support),
            "independent": list(self.independent),
        }

    @classmethod
    def from_dict(cls, data: dict) -> NearlyCoordinateData:
        return cls(
            int(data["determined"]),
            int(data["inflation"]),
            tuple(int(i) for i in data["phi_support"]),
            tuple(int(i) for i in data["independent"]),
        )


def nearly_coordinate(g: Group, d: NearlyCoordinateData) -> AffineHyperplane:
    """The hyperplane described by ``d``; its character is ``e_j + sum_{i in S} e_i``."""
    j = d.determined
    if not 0 <= j < g.rank:
        raise IndexError(f"determined index {j} out of range for {g}")
    support = set(d.phi_support)
    if len(support) != len(d.phi_support) or j in support:
        raise BadSupport("support must be distinct indices other than the determined one")
    for i in support:
        if not 0 <= i < g.rank:
            raise BadSupport(f"support index {i} out of range")
        if g.moduli[i] != 2:
            raise BadSupport(f"phi is supported on Z/{g.moduli[i]} (index {i}), not Z/2")
    expected_rest = tuple(i for i in range(g.rank) if i != j and i not in support)
    if tuple(d.independent) != expected_rest:
        raise BadSupport("independent indices must be the complement of the support")
    nj = g.moduli[j]
    if d.inflation != default_inflation(nj) or (support and nj % 2):
        raise BadInflation(f"inflation {d.inflation} incompatible with Z/{nj}")
    coords = tuple(1 if (i == j or i in support) else 0 for i in range(g.rank))
    return AffineHyperplane(Character(g, coords), Fraction(len(support), 2))


def all_nearly_coordinate(g: Group) -> list[NearlyCoordinateData]:
    """Every admissible nearly-coordinate datum for ``g``."""
    twos = [i for i, n in enumerate(g.moduli) if n == 2]
    out = []
    for j in range(g.rank):
        pool = [i for i in twos if i != j]
        subsets = [()]
        if g.moduli[j] % 2 == 0:
            subsets = [s for k in range(len(pool) + 1) for s in itertools.combinations(pool, k)]
        for s in subsets:
            out.append(NearlyCoordinateData.build(g, j, s))
    return out


# ---------------------------------------------------------- classification

class WrongQuotientOrder(HypothesisFailure):
    pass


def classify_zi_hyperplane(h: AffineHyperplane, i: int) -> NearlyCoordinateData:
    """A nearly-``Z_i`` hyperplane containing the ``z_i``-hyperplane ``h``.

    The inflation is read off the projection to coordinate ``i`` (which
    must be ``r Z / 2r`` unless it is trivial); the homomorphism is found
    by searching characters supported on the Z/2 factors, preferring one
    that reproduces ``h`` exactly.
    """
    g = h.group
    if g.z(i) not in h or not is_contained_in_zero_locus(h):
        raise NotZ0Hyperplane(f"{h!r} is not a z_{i}-hyperplane")
    ni = g.moduli[i]
    r = ni
    for a in h.members:
        r = math.gcd(r, a[i])
    if r == ni:
        data = NearlyCoordinateData.build(g, i)
        if h.mask & ~nearly_coordinate(g, data).mask:
            raise ClassificationFailure(f"{h!r} has trivial projection but escapes Z_{i}")
        return data
    if 2 * r != ni:
        raise ClassificationFailure(f"projection of {h!r} to coordinate {i} is {r}Z/{ni}")
    pool = [k for k, n in enumerate(g.moduli) if n == 2 and k != i]
    containing = None
    for size in range(1, len(pool) + 1):
        for support in itertools.combinations(pool, size):
            data = NearlyCoordinateData.build(g, i, support)
            big = nearly_coordinate(g, data)
            if big == h:
                return data
            if containing is None and h.mask & ~big.mask == 0:
                containing = data
    if containing is None:
        raise ClassificationFailure(f"no nearly-Z_{i} hyperplane contains {h!r}")
    return containing


def classify_z0_hyperplane(h: AffineHyperplane) -> NearlyCoordinateData:
    return classify_zi_hyperplane(h, 0)


def classify_order2(h: AffineHyperplane, determined: int | None = None) -> NearlyCoordinateData:
    """Nearly-coordinate form of an order-2 hyperplane inside the zero locus.

    With ``r = 1`` any support coordinate can play the determined role;
    by default the least one is reported.
    """
    g = h.group
    if not is_contained_in_zero_locus(h):
        raise NotInZeroLocus(f"{h!r} is not contained in the zero locus")
    if h.order != 2:
        raise WrongQuotientOrder(f"{h!r} has quotient order {h.order}, not 2")
    support = [i for i, x in enumerate(h.character.coords) if x]
    wide = [i for i in support if g.moduli[i] != 2]
    if wide:
        raise ClassificationFailure(f"order-2 hyperplane {h!r} touches factors {wide} of order > 2")
    j = support[0] if determined is None else determined
    if j not in support:
        raise BadSupport(f"coordinate {j} is not in the support {support}")
    data = NearlyCoordinateData.build(g, j, [i for i in support if i != j])
    if nearly_coordinate(g, data) != h:
        raise ClassificationFailure(f"{h!r} is not the nearly-coordinate hyperplane on {support}")
    return data


def require_same_group(g: Group, hs: Iterable[AffineHyperplane]) -> None:
    for h in hs:
        if h.group != g:
            raise GroupMismatch(f"{h!r} does not live in {g}")
