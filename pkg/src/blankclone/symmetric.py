"""Occupation-number basis of the symmetric subspace and cloning amplitudes.

An occupation vector ``(n_1, ..., n_d)`` counts how many of ``k`` qudits sit
in each level. The normalized symmetric ket ``|n>`` is the equal superposition
of all distinct orderings of the corresponding computational string.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod, sqrt
from typing import Iterator, Sequence

import numpy as np

from .tensor import StateVector


@dataclass(frozen=True, order=True)
class OccupationVector:
    """Level counts of ``total`` identical qudits; ordering is lexicographic."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise ValueError("occupation vector needs at least one level")
        if any(c < 0 for c in counts):
            raise ValueError(f"occupation counts must be non-negative: {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def __add__(self, other: "OccupationVector") -> "OccupationVector":
        if other.d != self.d:
            raise ValueError(f"cannot add occupations of lengths {self.d} and {other.d}")
        return OccupationVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __iter__(self):
        return iter(self.counts)

    def __str__(self):
        return "(" + ",".join(map(str, self.counts)) + ")"


def sym_dim(N: int, d: int) -> int:
    """Dimension binom(N+d-1, d-1) of the symmetric subspace of N qudits."""
    if d < 1:
        raise ValueError(f"local dimension must be >= 1, got {d}")
    if N < 0:
        raise ValueError(f"particle number must be >= 0, got {N}")
    return comb(N + d - 1, d - 1)


def machine_dim(N: int, M: int, d: int) -> int:
    """Ancilla dimension (M-N+d-1)! / ((M-N)! (d-1)!) of the N -> M cloner."""
    if not 1 <= N < M:
        raise ValueError(f"need M > N >= 1, got N={N}, M={M}")
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return factorial(M - N + d - 1) // (factorial(M - N) * factorial(d - 1))


def _compositions(total: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _occupations(total: int, d: int) -> tuple[OccupationVector, ...]:
    return tuple(OccupationVector(c) for c in _compositions(total, d))


def enumerate_occupations(total: int, d: int) -> list[OccupationVector]:
    """All occupation vectors of length d summing to ``total``, ascending."""
    if total < 0 or d < 1:
        raise ValueError(f"need total >= 0 and d >= 1, got total={total}, d={d}")
    return list(_occupations(total, d))


@dataclass(frozen=True)
class SymmetricBasis:
    d: int
    N: int
    ordering: tuple[OccupationVector, ...]

    @classmethod
    def of(cls, N: int, d: int) -> "SymmetricBasis":
        return cls(d, N, tuple(enumerate_occupations(N, d)))

    def __len__(self):
        return len(self.ordering)

    def index(self, n: OccupationVector) -> int:
        return self.ordering.index(n)


def alpha_squared(n: OccupationVector, j: OccupationVector, N: int, M: int, d: int) -> Fraction:
    """Exact rational value of the squared cloning amplitude."""
    if n.d != d or j.d != d:
        raise ValueError(f"occupation vectors must have length d={d}")
    if n.total != N or j.total != M - N:
        raise ValueError(f"need sum(n) = {N} and sum(j) = {M - N}, got {n.total} and {j.total}")
    pref = Fraction(factorial(M - N) * factorial(N + d - 1), factorial(M + d - 1))
    ratio = prod(
        Fraction(factorial(a + b), factorial(a) * factorial(b)) for a, b in zip(n.counts, j.counts)
    )
    return pref * ratio


def alpha(n: OccupationVector, j: OccupationVector, N: int, M: int, d: int) -> float:
    """Amplitude of |n+j>|M_j> in the image of |n> under the N -> M cloner.

    The factorial ratio is evaluated exactly and rounded once at the end.
    """
    return sqrt(alpha_squared(n, j, N, M, d))


def _distinct_permutations(seq: Sequence[int]) -> Iterator[tuple[int, ...]]:
    # next-permutation over the sorted multiset, each arrangement once
    a = sorted(seq)
    k = len(a)
    while True:
        yield tuple(a)
        i = k - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = k - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def multinomial(counts: Sequence[int]) -> int:
    return factorial(sum(counts)) // prod(factorial(c) for c in counts)


def symmetric_support(n: OccupationVector) -> list[int]:
    """Flat computational-basis indices of the strings of type ``n``."""
    d = n.d
    word = [level for level, c in enumerate(n.counts) for _ in range(c)]
    idx = []
    for perm in _distinct_permutations(word):
        x = 0
        for digit in perm:
            x = x * d + digit
        idx.append(x)
    return idx


def embed_symmetric(n: OccupationVector) -> StateVector:
    """The normalized symmetric ket |n> in the full d^k tensor space."""
    k, d = n.total, n.d
    if k == 0:
        return StateVector(np.ones(1, dtype=complex), ())
    amps = np.zeros(d**k, dtype=complex)
    support = symmetric_support(n)
    amps[support] = 1.0 / sqrt(len(support))
    return StateVector(amps, (d,) * k)


def symmetric_projector(N: int, d: int) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of N qudits."""
    vecs = np.stack([embed_symmetric(n).amplitudes for n in enumerate_occupations(N, d)], axis=1)
    return vecs @ vecs.conj().T
