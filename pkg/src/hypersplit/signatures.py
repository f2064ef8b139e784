"""Lens-space rho invariants and the arithmetic of twisted signatures.

``rho(L(n, q), k)`` is evaluated from the closed floor-sum formula

    rho = -(2q/n) k^2 + 2k - 1 + 2 floor(kq/n) + 4 sum_{j<k} floor(jq/n),

with ``rho(0) = 0``.  Everything here is exact except ``model_signature``,
which diagonalizes a small complex Hermitian form in floating point.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import Element, Group, HomMatrix, check_budget, is_isomorphism
from .duality import BlockFormReport, analyze_iso
from .errors import (
    BadCharacter,
    BadLens,
    CancellationFails,
    GroupMismatch,
    NonIntegralSignature,
    NotSignaturePreserving,
)

EIGEN_TOL = 1e-9


@dataclass(frozen=True)
class LensSpace:
    n: int
    q: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise BadLens(f"L({self.n},{self.q}): n must exceed 1")
        if not 0 < self.q < self.n or math.gcd(self.n, self.q) != 1:
            raise BadLens(f"L({self.n},{self.q}): need 0 < q < n with gcd(n, q) = 1")

    def __str__(self) -> str:
        return f"L({self.n},{self.q})"

    def _check_k(self, k: int) -> int:
        if not 0 <= k < self.n:
            raise BadCharacter(f"character {k} is outside Z/{self.n}")
        return k


def rho(lens: LensSpace, k: int) -> Fraction:
    n, q = lens.n, lens.q
    lens._check_k(k)
    if k == 0:
        return Fraction(0)
    floors = sum((j * q) // n for j in range(1, k))
    return Fraction(-2 * q * k * k, n) + 2 * k - 1 + 2 * ((k * q) // n) + 4 * floors


def rho_numerators(lens: LensSpace) -> np.ndarray:
    """``n * rho(k)`` for every ``k``, as an exact integer array."""
    n, q = lens.n, lens.q
    k = np.arange(n, dtype=np.int64)
    fl = k * q // n
    prefix = np.concatenate(([0], np.cumsum(fl)[:-1]))  # sum_{j<k} floor(jq/n)
    out = -2 * q * k * k + n * (2 * k - 1 + 2 * fl + 4 * prefix)
    out[0] = 0
    return out


@dataclass(frozen=True)
class RhoTable:
    lens: LensSpace
    values: tuple[Fraction, ...]

    @classmethod
    def compute(cls, lens: LensSpace) -> RhoTable:
        nums = rho_numerators(lens)
        return cls(lens, tuple(Fraction(int(v), lens.n) for v in nums))

    def __getitem__(self, k: int) -> Fraction:
        return self.values[self.lens._check_k(k)]

    def to_dict(self) -> dict:
        return {
            "n": self.lens.n,
            "q": self.lens.q,
            "rho": {str(k): str(v) for k, v in enumerate(self.values)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> RhoTable:
        lens = LensSpace(int(data["n"]), int(data["q"]))
        vals = [Fraction(data["rho"][str(k)]) for k in range(lens.n)]
        return cls(lens, tuple(vals))


def rho_table(lens: LensSpace) -> RhoTable:
    return RhoTable.compute(lens)


def mod2(x: Fraction) -> Fraction:
    return x - 2 * math.floor(x / 2)


def rho_parity(lens: LensSpace, k: int) -> Fraction:
    """Residue of ``-(2k^2 q + n)/n`` in ``[0, 2)``."""
    lens._check_k(k)
    if k == 0:
        raise BadCharacter("the parity identity concerns nontrivial characters")
    n, q = lens.n, lens.q
    return mod2(Fraction(-(2 * k * k * q + n), n))


def certify_signature_simple(lens: LensSpace) -> bool:
    """Whether ``rho`` vanishes only at the trivial character."""
    return bool(np.all(rho_numerators(lens)[1:] != 0))


def lens_bounded_signature(lens: LensSpace, copies: int, phi: int) -> int:
    """``-copies * rho(lens, phi)``, which must be an integer."""
    if copies < 1:
        raise BadLens("the number of boundary copies must be positive")
    value = -copies * rho(lens, phi)
    if value.denominator != 1:
        raise NonIntegralSignature(
            f"{copies} * rho({lens}, {phi}) = {-value} is not an integer"
        )
    return int(value)


def model_signature(n: int, j: int, tol: float = EIGEN_TOL) -> int:
    """Signature of the standard form on the ``zeta^j`` eigenspace of the shift on sum-zero vectors."""
    if n < 2 or not 0 <= j < n:
        raise BadCharacter(f"need n >= 2 and 0 <= j < n, got n={n}, j={j}")
    lam = cmath.exp(2j * cmath.pi * j / n)
    shift = np.roll(np.eye(n), 1, axis=0)  # (shift z)_{i+1} = z_i
    # v is in the eigenspace iff (shift - lam) v = 0 and sum(v) = 0
    system = np.vstack([shift - lam * np.eye(n), np.ones((1, n))])
    _, s, vh = np.linalg.svd(system)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    basis = vh[rank:].conj().T
    if basis.shape[1] == 0:
        return 0
    gram = basis.conj().T @ basis
    eig = np.linalg.eigvalsh(gram)
    return int(np.sum(eig > tol)) - int(np.sum(eig < -tol))


# ---------------------------------------------------------- signature families

def _is_signature_simple(table: Sequence[int]) -> bool:
    return table[0] == 0 and all(v != 0 for v in table[1:])


@dataclass(frozen=True)
class SignatureFamily:
    """Per-factor twisted signatures ``sigma_i: Z/n_i -> Z`` of a product family."""

    moduli: tuple[int, ...]
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        group = Group(tuple(self.moduli))
        tables = tuple(tuple(int(v) for v in t) for t in self.tables)
        if len(tables) != group.rank or any(len(t) != n for t, n in zip(tables, group.moduli)):
            raise GroupMismatch("one table of length n_i is needed per factor")
        object.__setattr__(self, "moduli", group.moduli)
        object.__setattr__(self, "tables", tables)
        for i, t in enumerate(tables):
            if not _is_signature_simple(t):
                warnings.warn(f"factor {i} (Z/{self.moduli[i]}) is not signature-simple", stacklevel=2)

    @classmethod
    def from_function(cls, moduli: Iterable[int], sigma: Callable[[int, int], int]) -> SignatureFamily:
        moduli = tuple(moduli)
        return cls(moduli, tuple(tuple(sigma(n, k) for k in range(n)) for n in moduli))

    @classmethod
    def model(cls, moduli: Iterable[int]) -> SignatureFamily:
        return cls.from_function(moduli, model_signature)

    @classmethod
    def lens_bounded(cls, lenses: Sequence[LensSpace], copies: int | None = None) -> SignatureFamily:
        """Factors bounded by ``copies`` copies of each lens space (default: ``n`` copies)."""
        tables = []
        for L in lenses:
            k = L.n if copies is None else copies
            tables.append(tuple(lens_bounded_signature(L, k, j) for j in range(L.n)))
        return cls(tuple(L.n for L in lenses), tuple(tables))

    @property
    def group(self) -> Group:
        return Group(self.moduli)

    def is_signature_simple(self) -> bool:
        return all(_is_signature_simple(t) for t in self.tables)

    def __add__(self, other: SignatureFamily) -> SignatureFamily:
        """Product manifold: concatenate the factors."""
        return SignatureFamily(self.moduli + other.moduli, self.tables + other.tables)


def product_signature(fam: SignatureFamily, phi: Element) -> int:
    phi = fam.group.check(tuple(phi))
    out = 1
    for t, k in zip(fam.tables, phi):
        out *= t[k]
    return out


def signature_values(fam: SignatureFamily) -> np.ndarray:
    """``product_signature`` at every character, lexicographic order."""
    g = fam.group
    check_budget(g.order)
    out = np.ones(g.order, dtype=np.int64)
    for i, t in enumerate(fam.tables):
        out *= np.asarray(t, dtype=np.int64)[g.array[:, i]]
    return out


def signature_zero_locus(fam: SignatureFamily) -> frozenset[Element]:
    g = fam.group
    return g.elements_of(g.mask(signature_values(fam) == 0))


def check_cancellable(famA: SignatureFamily, famB: SignatureFamily) -> None:
    """Raise CancellationFails unless the two character groups could match."""
    ga, gb = famA.group, famB.group
    if ga.order != gb.order:
        raise CancellationFails(f"character groups of orders {gb.order} and {ga.order} are not isomorphic")
    for n in ga.moduli + gb.moduli:
        if n % 2 == 0:
            raise CancellationFails(f"modulus {n} is even; cancellation needs odd moduli")


def cancellation_analyze(famA: SignatureFamily, famB: SignatureFamily, f: HomMatrix) -> BlockFormReport:
    """Analyze an isomorphism ``f`` from ``famB``'s characters to ``famA``'s.

    ``f`` must carry the vanishing locus of ``famB``'s signature onto that
    of ``famA`` (only ``|sigma|`` matters, so orientation signs are
    irrelevant); the block form of ``f`` is then returned.  With all moduli
    odd this block form is a permutation times a unit diagonal.
    """
    check_cancellable(famA, famB)
    ga, gb = famA.group, famB.group
    if f.source != gb or f.target != ga:
        raise GroupMismatch(f"expected a map {gb} -> {ga}")
    if not is_isomorphism(f):
        raise CancellationFails("the character map is not an isomorphism")
    zb = signature_values(famB) == 0
    za = signature_values(famA) == 0
    if not np.array_equal(za[f.image_indices], zb):
        raise NotSignaturePreserving("the map does not match the signature zero loci")
    return analyze_iso(f)
