"""Finite abelian groups written as products of cyclic factors.

A group is the ordered list of its cyclic moduli ``(n_0, ..., n_m)``.
Elements are plain tuples of coordinates reduced into ``[0, n_i)``, so
equality and hashing are structural.  Characters (elements of the
Pontryagin dual) use the canonical identification

    phi_x(a) = sum_i a_i * x_i / n_i   (mod 1)

and are evaluated exactly with :class:`fractions.Fraction`.  Coordinates
are indexed from 0 throughout.

Exhaustive operations are guarded by an enumeration budget (default
20,000 elements, overridable with the ``HYPERSPLIT_MAX_ORDER`` environment
variable or per call).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    EnumerationBudgetExceeded,
    GroupMismatch,
    IllDefinedHom,
    InvalidModulus,
)

DEFAULT_MAX_ORDER = 20_000
BUDGET_ENV = "HYPERSPLIT_MAX_ORDER"

Element = tuple[int, ...]


def max_order() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_MAX_ORDER


def check_budget(order: int, budget: int | None = None) -> None:
    limit = max_order() if budget is None else budget
    if order > limit:
        raise EnumerationBudgetExceeded(
            f"group of order {order} exceeds the enumeration budget {limit}"
        )


def mod1(x: Fraction | int) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def units(n: int) -> list[int]:
    return [u for u in range(1, n + 1) if math.gcd(u, n) == 1]


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------- literals

def parse_ints(text: str) -> tuple[int, ...]:
    """Parse ``"2,3,4"`` into ``(2, 3, 4)``."""
    parts = [p.strip() for p in str(text).split(",")]
    if not parts or any(p == "" for p in parts):
        raise EmptyInput(f"malformed integer list {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise EmptyInput(f"malformed integer list {text!r}") from exc


def format_ints(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in values)


def parse_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    """Parse ``"1,0;0,1"``; row ``j`` is target coordinate ``j``."""
    return tuple(parse_ints(row) for row in str(text).split(";"))


def format_matrix(rows: Sequence[Sequence[int]]) -> str:
    return ";".join(format_ints(r) for r in rows)


def parse_qz(text: str) -> Fraction:
    try:
        return mod1(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise EmptyInput(f"malformed rational {text!r}") from exc


def format_fraction(x: Fraction) -> str:
    return str(x)


# ------------------------------------------------------------------ groups

@dataclass(frozen=True)
class Group:
    """``A = Z/n_0 x ... x Z/n_m`` with every ``n_i >= 2``."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        mods = tuple(int(n) for n in self.moduli)
        if not mods:
            raise InvalidModulus("a group needs at least one cyclic factor")
        for n in mods:
            if n < 2:
                raise InvalidModulus(f"modulus {n} < 2")
        object.__setattr__(self, "moduli", mods)

    @classmethod
    def parse(cls, text: str) -> Group:
        return cls(parse_ints(text))

    def __str__(self) -> str:
        return " x ".join(f"Z/{n}" for n in self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.moduli)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for n in reversed(self.moduli):
            out.append(acc)
            acc *= n
        return tuple(reversed(out))

    # elements

    def element(self, coords: Iterable[int]) -> Element:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise GroupMismatch(f"{coords} has {len(coords)} coordinates, {self} has {self.rank}")
        return tuple(int(c) % n for c, n in zip(coords, self.moduli))

    def contains(self, a: Sequence[int]) -> bool:
        return len(a) == self.rank and all(0 <= c < n for c, n in zip(a, self.moduli))

    def check(self, a: Sequence[int]) -> Element:
        if not self.contains(a):
            raise GroupMismatch(f"{tuple(a)} is not a reduced element of {self}")
        return tuple(a)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    @property
    def ones(self) -> Element:
        return (1,) * self.rank

    def basis(self, i: int) -> Element:
        self._check_index(i)
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def z(self, i: int) -> Element:
        """The vector with 0 in slot ``i`` and 1 elsewhere."""
        self._check_index(i)
        return tuple(0 if k == i else 1 for k in range(self.rank))

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.rank:
            raise IndexError(f"coordinate {i} out of range for {self}")

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.moduli))

    def neg(self, a: Element) -> Element:
        return tuple(-x % n for x, n in zip(a, self.moduli))

    def scale(self, k: int, a: Element) -> Element:
        return tuple(k * x % n for x, n in zip(a, self.moduli))

    def combine(self, terms: Iterable[tuple[int, Element]]) -> Element:
        """Integer combination ``sum t_i x_i``."""
        acc = [0] * self.rank
        for t, x in terms:
            for k, c in enumerate(x):
                acc[k] += t * c
        return self.element(acc)

    def element_order(self, a: Element) -> int:
        return math.lcm(*(n // math.gcd(n, x) for x, n in zip(a, self.moduli)))

    def index(self, a: Element) -> int:
        """Position of ``a`` in lexicographic enumeration order."""
        return sum(c * s for c, s in zip(a, self.strides))

    def element_at(self, idx: int) -> Element:
        return tuple((idx // s) % n for s, n in zip(self.strides, self.moduli))

    def elements(self, budget: int | None = None) -> Iterator[Element]:
        check_budget(self.order, budget)
        return itertools.product(*(range(n) for n in self.moduli))

    def character(self, coords: Iterable[int]) -> Character:
        return Character(self, tuple(coords))

    def characters(self, budget: int | None = None) -> Iterator[Character]:
        for x in self.elements(budget):
            yield Character(self, x)

    # dense tables used by the exhaustive algorithms

    @cached_property
    def array(self) -> np.ndarray:
        """All elements as an ``(order, rank)`` integer array, lexicographic."""
        check_budget(self.order)
        grids = np.indices(self.moduli).reshape(self.rank, -1).T
        return np.ascontiguousarray(grids, dtype=np.int64)

    @cached_property
    def level_weights(self) -> np.ndarray:
        """``exponent / n_i``: scaling that puts every ``1/n_i`` over a common denominator."""
        return np.array([self.exponent // n for n in self.moduli], dtype=np.int64)

    @cached_property
    def moduli_array(self) -> np.ndarray:
        return np.array(self.moduli, dtype=np.int64)

    @cached_property
    def stride_array(self) -> np.ndarray:
        return np.array(self.strides, dtype=np.int64)

    def levels(self, chars: np.ndarray) -> np.ndarray:
        """``exponent * phi_x(a)`` for all elements ``a`` (rows) and characters ``x`` (columns)."""
        chars = np.atleast_2d(np.asarray(chars, dtype=np.int64))
        return (self.array * self.level_weights) @ chars.T % self.exponent

    def mask(self, flags: np.ndarray) -> int:
        return mask_from_flags(flags)

    def mask_of(self, elements: Iterable[Element]) -> int:
        m = 0
        for a in elements:
            m |= 1 << self.index(self.check(a))
        return m

    def elements_of(self, mask: int) -> frozenset[Element]:
        return frozenset(self.element_at(i) for i in mask_indices(mask))

    @cached_property
    def zero_locus_mask(self) -> int:
        return mask_from_flags((self.array == 0).any(axis=1))

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1


def make_group(moduli: Iterable[int]) -> Group:
    return Group(tuple(moduli))


def enumerate_elements(g: Group, budget: int | None = None) -> Iterator[Element]:
    return g.elements(budget)


def mask_from_flags(flags: np.ndarray) -> int:
    flags = np.asarray(flags, dtype=bool).ravel()
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def flags_from_mask(mask: int, size: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def mask_indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# -------------------------------------------------------------- characters

@dataclass(frozen=True)
class Character:
    """The homomorphism ``a -> sum a_i x_i / n_i`` into Q/Z."""

    group: Group
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", self.group.element(self.coords))

    @cached_property
    def order(self) -> int:
        return self.group.element_order(self.coords)

    @property
    def is_trivial(self) -> bool:
        return not any(self.coords)

    @cached_property
    def weights(self) -> tuple[int, ...]:
        """Integers ``w_i`` with ``phi(a) = sum a_i w_i / order``."""
        d = self.order
        return tuple(x * d // n for x, n in zip(self.coords, self.group.moduli))

    def level(self, a: Element) -> int:
        """``order * phi(a)`` as an integer mod ``order``."""
        return sum(c * w for c, w in zip(a, self.weights)) % self.order

    def __call__(self, a: Element) -> Fraction:
        return char_eval(self, a)

    def __add__(self, other: Character) -> Character:
        if other.group != self.group:
            raise GroupMismatch("characters of different groups")
        return Character(self.group, self.group.add(self.coords, other.coords))

    def scaled(self, k: int) -> Character:
        return Character(self.group, self.group.scale(k, self.coords))

    def canonical(self) -> Character:
        """Lexicographically least generator of the cyclic group ``<self>``."""
        if self.is_trivial:
            return self
        best = min(self.group.scale(u, self.coords) for u in units(self.order))
        return Character(self.group, best)

    def kernel_mask(self) -> int:
        return self.group.mask(self.group.levels(self.coords)[:, 0] == 0)


def char_eval(phi: Character, a: Element) -> Fraction:
    a = phi.group.check(a)
    return Fraction(phi.level(a), phi.order)


def basis_character(g: Group, i: int) -> Character:
    return Character(g, g.basis(i))


# ---------------------------------------------------------- homomorphisms

@dataclass(frozen=True)
class HomMatrix:
    """Homomorphism ``source -> target``; column ``i`` is the image of ``e_i``.

    ``entries[j][i]`` is taken mod the ``j``'th target modulus and must
    satisfy ``n_i * entries[j][i] = 0 (mod n'_j)``.
    """

    source: Group
    target: Group
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        if len(rows) != self.target.rank or any(len(r) != self.source.rank for r in rows):
            raise IllDefinedHom(
                f"matrix shape does not match {self.source} -> {self.target}"
            )
        reduced = tuple(
            tuple(v % nj for v in row) for row, nj in zip(rows, self.target.moduli)
        )
        for j, nj in enumerate(self.target.moduli):
            for i, ni in enumerate(self.source.moduli):
                if ni * reduced[j][i] % nj:
                    raise IllDefinedHom(
                        f"entry [{j}][{i}] = {reduced[j][i]} does not give Z/{ni} -> Z/{nj}"
                    )
        object.__setattr__(self, "entries", reduced)

    @classmethod
    def identity(cls, g: Group) -> HomMatrix:
        return cls(g, g, tuple(g.basis(j) for j in range(g.rank)))

    @classmethod
    def from_columns(cls, source: Group, target: Group, columns: Sequence[Element]) -> HomMatrix:
        rows = tuple(tuple(col[j] for col in columns) for j in range(target.rank))
        return cls(source, target, rows)

    @classmethod
    def parse(cls, source: Group, target: Group, text: str) -> HomMatrix:
        return cls(source, target, parse_matrix(text))

    def __str__(self) -> str:
        return format_matrix(self.entries)

    def column(self, i: int) -> Element:
        return tuple(row[i] for row in self.entries)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.target.rank, self.source.rank)

    def __call__(self, a: Element) -> Element:
        return apply_hom(self, a)

    def compose(self, inner: HomMatrix) -> HomMatrix:
        """``self o inner``."""
        if inner.target != self.source:
            raise GroupMismatch("composition of incompatible homomorphisms")
        cols = [self(inner.column(i)) for i in range(inner.source.rank)]
        return HomMatrix.from_columns(inner.source, self.target, cols)

    @cached_property
    def image_indices(self) -> np.ndarray:
        """Index in ``target`` of the image of every source element (lexicographic)."""
        images = self.source.array @ self.matrix.T % self.target.moduli_array
        return images @ self.target.stride_array


def apply_hom(f: HomMatrix, a: Element) -> Element:
    a = f.source.check(a)
    return tuple(
        sum(v * c for v, c in zip(row, a)) % nj
        for row, nj in zip(f.entries, f.target.moduli)
    )


def is_isomorphism(f: HomMatrix) -> bool:
    if f.source.order != f.target.order:
        return False
    return int(np.count_nonzero(f.image_indices == 0)) == 1


# -------------------------------------------------------- affine subgroups

def span(g: Group, generators: Iterable[Element]) -> frozenset[Element]:
    """Subgroup generated by ``generators``."""
    check_budget(g.order)
    members = {g.zero}
    for x in generators:
        x = g.check(x)
        if x in members:
            continue
        frontier = list(members)
        while frontier:
            fresh = []
            for y in frontier:
                s = g.add(y, x)
                if s not in members:
                    members.add(s)
                    fresh.append(s)
            frontier = fresh
    return frozenset(members)


@dataclass(frozen=True)
class AffineSubgroup:
    """``basepoint + span(generators)``: a coset of a subgroup."""

    group: Group
    basepoint: Element
    generators: tuple[Element, ...]

    @cached_property
    def linear_members(self) -> frozenset[Element]:
        return span(self.group, self.generators)

    @cached_property
    def members(self) -> frozenset[Element]:
        g = self.group
        return frozenset(g.add(self.basepoint, s) for s in self.linear_members)

    def __contains__(self, a: Element) -> bool:
        return self.group.sub(a, self.basepoint) in self.linear_members

    def __len__(self) -> int:
        return len(self.linear_members)

    @property
    def index(self) -> int:
        return self.group.order // len(self.linear_members)

    def annihilator(self) -> list[Character]:
        """Characters vanishing on the linear translate."""
        g = self.group
        gens = [x for x in self.generators if any(x)]
        if not gens:
            return list(g.characters())
        vals = (np.array(gens, dtype=np.int64) * g.level_weights) @ g.array.T % g.exponent
        hits = np.flatnonzero((vals == 0).all(axis=0))
        return [Character(g, g.element_at(int(i))) for i in hits]

    def quotient_is_cyclic(self) -> bool:
        q = self.index
        return any(chi.order == q for chi in self.annihilator())


def affine_closure(g: Group, points: Iterable[Element]) -> AffineSubgroup:
    """Smallest affine subgroup containing ``points``."""
    pts = [g.check(tuple(p)) for p in points]
    if not pts:
        raise EmptyInput("affine closure of an empty set")
    base = pts[0]
    diffs = []
    for p in pts[1:]:
        d = g.sub(p, base)
        if any(d) and d not in diffs:
            diffs.append(d)
    return AffineSubgroup(g, base, tuple(diffs))
