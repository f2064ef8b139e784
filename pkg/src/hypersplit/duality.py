"""Pontryagin duals of homomorphisms and the structure of zero-locus preserving maps.

Characters of ``A = prod Z/n_i`` are identified with ``A`` itself through
``x -> phi_x``, so the dual of a homomorphism ``f: A -> A'`` is again an
integer matrix, ``f^v: A' -> A`` with entries ``n_i f[j][i] / n'_j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import (
    Character,
    Element,
    Group,
    HomMatrix,
    check_budget,
    is_isomorphism,
    units,
)
from .errors import (
    EmptyPreimage,
    GroupMismatch,
    HypothesisFailure,
    NotAHyperplane,
    NotIso,
    NotZPreserving,
    TheoremViolation,
)
from .hyperplanes import AffineHyperplane, coordinate_hyperplane
from .splittings import Splitting, least_matching, recover


HOM_BUDGET = 1_000_000


class UnsortedModuli(HypothesisFailure):
    pass


def annihilator(h: AffineHyperplane) -> Character:
    """Canonical generator of the characters vanishing on ``h``'s linear translate."""
    return h.character.canonical()


def annihilator_group(h: AffineHyperplane) -> list[Character]:
    """All characters vanishing on the linear translate, by exhaustive evaluation."""
    g = h.group
    lin = g.elements_of(h.linear().mask)
    rows = np.array(sorted(lin), dtype=np.int64)
    vals = g.levels(rows).T  # characters x run over all elements; symmetric pairing
    hits = np.flatnonzero((vals == 0).all(axis=0))
    return [Character(g, g.element_at(int(i))) for i in hits]


def dual_hom(f: HomMatrix) -> HomMatrix:
    """The matrix of ``f^v: (A')^v -> A^v``."""
    src, tgt = f.source, f.target
    rows = tuple(
        tuple(ni * f.entries[j][i] // nj for j, nj in enumerate(tgt.moduli))
        for i, ni in enumerate(src.moduli)
    )
    return HomMatrix(tgt, src, rows)


def pullback(f: HomMatrix, psi: Character) -> Character:
    """``psi o f`` as a character of ``f.source``."""
    if psi.group != f.target:
        raise GroupMismatch("character is not on the target of the homomorphism")
    return Character(f.source, dual_hom(f)(psi.coords))


def inverse(f: HomMatrix) -> HomMatrix:
    if not is_isomorphism(f):
        raise NotIso("only isomorphisms can be inverted")
    src, tgt = f.source, f.target
    preimage = np.empty(tgt.order, dtype=np.int64)
    preimage[f.image_indices] = np.arange(src.order)
    cols = [src.element_at(int(preimage[tgt.index(tgt.basis(j))])) for j in range(tgt.rank)]
    return HomMatrix.from_columns(tgt, src, cols)


def transport_hyperplane(f: HomMatrix, h: AffineHyperplane) -> AffineHyperplane:
    """The preimage ``f^{-1}(h)`` as a hyperplane of ``f.source``."""
    if h.group != f.target:
        raise GroupMismatch("hyperplane is not over the target of the homomorphism")
    psi = pullback(f, h.character)
    if psi.is_trivial:
        if h.target == 0:
            raise NotAHyperplane("the preimage is the whole group")
        raise EmptyPreimage("the preimage is empty")
    if (h.target * psi.order).denominator != 1:
        raise EmptyPreimage(f"{h!r} misses the image of the homomorphism")
    return AffineHyperplane(psi, h.target)


def _zero_flags(g: Group) -> np.ndarray:
    return (g.array == 0).any(axis=1)


def _affine_images(f: HomMatrix, offset: Element | None) -> np.ndarray:
    idx = f.image_indices
    if offset is None or not any(offset):
        return idx
    tgt = f.target
    c = np.array(tgt.check(offset), dtype=np.int64)
    images = (f.source.array @ f.matrix.T + c) % tgt.moduli_array
    return images @ tgt.stride_array


def preserves_zero_locus(f: HomMatrix, offset: Element | None = None) -> bool:
    """Whether ``a -> f(a) + offset`` carries the zero locus onto the zero locus."""
    if not is_isomorphism(f):
        raise NotIso("zero-locus preservation is only tested for isomorphisms")
    check_budget(f.source.order)
    images = _affine_images(f, offset)
    return bool(np.array_equal(_zero_flags(f.target)[images], _zero_flags(f.source)))


def z2_first_order(g: Group) -> list[int]:
    return sorted(range(g.rank), key=lambda i: (g.moduli[i] != 2, i))


def sort_z2_first(g: Group) -> Group:
    return Group(tuple(g.moduli[i] for i in z2_first_order(g)))


def is_z2_first(g: Group) -> bool:
    seen_big = False
    for n in g.moduli:
        if n == 2 and seen_big:
            return False
        seen_big = seen_big or n > 2
    return True


def homomorphisms(source: Group, target: Group) -> Iterator[HomMatrix]:
    """Every homomorphism, generated column by column from elements killed by ``n_i``."""
    arr = target.array
    options = []
    for n in source.moduli:
        ok = (arr * n % target.moduli_array == 0).all(axis=1)
        options.append([tuple(int(v) for v in row) for row in arr[ok]])
    check_budget(math.prod(len(o) for o in options), HOM_BUDGET)
    for cols in itertools.product(*options):
        yield HomMatrix.from_columns(source, target, cols)


def isomorphisms(source: Group, target: Group) -> Iterator[HomMatrix]:
    if source.order != target.order:
        return
    for f in homomorphisms(source, target):
        if is_isomorphism(f):
            yield f


# ------------------------------------------------------------- block form

@dataclass(frozen=True)
class BlockFormReport:
    """Block structure ``[[f11, 0], [f21, D]]`` of a zero-locus preserving isomorphism.

    ``perm[i]`` is the target coordinate paired with source coordinate
    ``i``; the rows of ``f`` reordered by ``perm`` give the block form.
    """

    ell: int
    perm: tuple[int, ...]
    moduli: tuple[int, ...]
    diag: tuple[int, ...]
    f11: tuple[tuple[int, ...], ...]
    f21: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...] | None = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "ell": self.ell,
            "perm": list(self.perm),
            "moduli": list(self.moduli),
            "diag": list(self.diag),
            "f11": [list(r) for r in self.f11],
            "f21": [list(r) for r in self.f21],
        }
        if self.offset is not None:
            out["offset"] = list(self.offset)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> BlockFormReport:
        off = data.get("offset")
        return cls(
            int(data["ell"]),
            tuple(data["perm"]),
            tuple(data["moduli"]),
            tuple(data["diag"]),
            tuple(tuple(r) for r in data["f11"]),
            tuple(tuple(r) for r in data["f21"]),
            None if off is None else tuple(off),
        )

    def is_monomial(self) -> bool:
        return self.ell == 0

    def offset_in_z2_block(self) -> bool:
        """Whether the offset vanishes on every factor of order > 2."""
        if self.offset is None:
            return True
        return not any(self.offset[j] for j in range(self.ell, len(self.offset)))


def _odd_determinant(rows: Sequence[Sequence[int]]) -> bool:
    """Whether a 0/1 matrix is invertible over Z/2."""
    m = [list(r) for r in rows]
    n = len(m)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] % 2), None)
        if piv is None:
            return False
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c] % 2:
                m[r] = [(a + b) % 2 for a, b in zip(m[r], m[c])]
    return True


def analyze_iso(f: HomMatrix, offset: Element | None = None) -> BlockFormReport:
    """Extract the block form of a zero-locus preserving (affine) isomorphism.

    The images of the source coordinate hyperplanes form a splitting of the
    target whose union is the zero locus.  Recovering that splitting pairs
    every source coordinate with a target coordinate; the block form is
    then read from the matrix of ``f`` and confirmed against the weighted
    transpose of its dual.
    """
    src, tgt = f.source, f.target
    if not (is_z2_first(src) and is_z2_first(tgt)):
        raise UnsortedModuli("moduli must list every Z/2 factor first; see sort_z2_first")
    if not is_isomorphism(f):
        raise NotIso("not an isomorphism")
    c = tgt.zero if offset is None else tgt.check(tuple(offset))
    if not preserves_zero_locus(f, c):
        raise NotZPreserving("the map does not carry the zero locus onto the zero locus")

    g_inv = inverse(f)
    images = []
    for i in range(src.rank):
        w = coordinate_hyperplane(src, i)
        chi = pullback(g_inv, w.character)  # character of f(W_i) on the target
        images.append(AffineHyperplane(chi, chi(c)))
    s = Splitting(tgt, tuple(images))
    rep = recover(s)
    where = {h: k for k, h in enumerate(s.hyperplanes)}
    perm = [rep.permutation[where[h]] for h in images]

    ell = sum(1 for n in src.moduli if n == 2)
    ell_t = sum(1 for n in tgt.moduli if n == 2)
    if ell != ell_t or src.rank != tgt.rank:
        raise TheoremViolation(f"factor counts differ: {src} vs {tgt}")
    # the Z/2 block may be paired in any order; take the least pairing with nonzero diagonal
    small = least_matching(
        [[j for j in range(ell) if f.entries[j][i]] for i in range(ell)]
    )
    if small is None:
        raise TheoremViolation("the Z/2 block of f is singular")
    perm[:ell] = small
    if sorted(perm) != list(range(src.rank)):
        raise TheoremViolation(f"recovered pairing {perm} is not a permutation")

    m = [[f.entries[perm[k]][i] for i in range(src.rank)] for k in range(src.rank)]
    for k in range(src.rank):
        if tgt.moduli[perm[k]] != src.moduli[k]:
            raise TheoremViolation(f"coordinate {k} of {src} paired with modulus {tgt.moduli[perm[k]]}")
    for k in range(ell):
        if any(m[k][i] for i in range(ell, src.rank)):
            raise TheoremViolation("upper-right block is nonzero")
    for k in range(ell, src.rank):
        for i in range(ell, src.rank):
            if i != k and m[k][i]:
                raise TheoremViolation("lower-right block is not diagonal")
    diag = tuple(m[k][k] for k in range(ell, src.rank))
    for d, n in zip(diag, src.moduli[ell:]):
        if np.gcd(d, n) != 1:
            raise TheoremViolation(f"diagonal entry {d} is not a unit mod {n}")
    f11 = tuple(tuple(m[k][:ell]) for k in range(ell))
    if ell and not _odd_determinant(f11):
        raise TheoremViolation("f11 is not invertible")
    f21 = tuple(tuple(m[k][:ell]) for k in range(ell, src.rank))

    # the same structure read off the dual: f^v = [[f11^v, f12^v], [0, D^v]]
    fv = dual_hom(f)
    for i in range(ell, src.rank):
        for k in range(src.rank):
            if k != i and fv.entries[i][perm[k]]:
                raise TheoremViolation("dual matrix is not block upper triangular")
    if dual_hom(fv) != f:
        raise TheoremViolation("weighted transpose does not invert")

    # c lies in every image f(W_i), so each coordinate of order > 2 is 0 or n/2
    for j, n in enumerate(tgt.moduli):
        if n > 2 and 2 * c[j] % n:
            raise TheoremViolation(f"offset {c} has coordinate {j} outside (n/2)Z/{n}")

    return BlockFormReport(
        ell=ell,
        perm=tuple(perm),
        moduli=src.moduli,
        diag=diag,
        f11=f11,
        f21=f21,
        offset=None if offset is None else c,
    )


def permutation_matrix(g: Group, perm: Sequence[int]) -> HomMatrix:
    """``e_i -> e_{perm[i]}``."""
    return HomMatrix.from_columns(g, g, [g.basis(perm[i]) for i in range(g.rank)])


def monomial_maps(g: Group) -> Iterator[HomMatrix]:
    """Permutation-times-unit-diagonal isomorphisms of ``g`` (respecting moduli)."""
    for perm in itertools.permutations(range(g.rank)):
        if any(g.moduli[perm[i]] != g.moduli[i] for i in range(g.rank)):
            continue
        for us in itertools.product(*(units(n) for n in g.moduli)):
            cols = [g.scale(us[i], g.basis(perm[i])) for i in range(g.rank)]
            yield HomMatrix.from_columns(g, g, cols)

