"""Seeded random states: Haar pure states, rank-2 mixtures, random densities."""
from __future__ import annotations

import numpy as np

from .tensor import DensityMatrix, StateVector

SeedLike = int | np.random.Generator | None


def rng_from(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def _gaussian(dim: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    return rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))


def haar_random_state(dim: int, seed: SeedLike = None, layout=None) -> StateVector:
    """Haar-distributed pure state (normalized complex Gaussian vector).

    ``seed`` may be an integer or an existing ``numpy`` Generator, in which case
    it is advanced.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    rng = rng_from(seed)
    return StateVector(_gaussian(dim, rng)[0], layout)


def haar_random_frame(dim: int, k: int, seed: SeedLike = None) -> np.ndarray:
    """``k`` orthonormal columns with the Haar distribution on the Stiefel manifold."""
    rng = rng_from(seed)
    g = _gaussian(dim, rng, k).T
    q, r = np.linalg.qr(g)
    # fixing the phases of diag(r) makes the QR factor Haar distributed
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_rank2_state(dim: int, seed: SeedLike = None, layout=None) -> DensityMatrix:
    """a|a1><a1| + (1-a)|a2><a2| with a ~ U[0, 1] and a Haar eigenbasis."""
    if dim < 2:
        raise ValueError("a rank-2 state needs dimension >= 2")
    rng = rng_from(seed)
    a = rng.uniform()
    frame = haar_random_frame(dim, 2, rng)
    m = a * np.outer(frame[:, 0], frame[:, 0].conj()) + (1 - a) * np.outer(frame[:, 1], frame[:, 1].conj())
    return DensityMatrix(m, layout)


def random_density(dim: int, seed: SeedLike = None, layout=None) -> DensityMatrix:
    """Full-rank random state G G^dagger / tr(G G^dagger), G complex Gaussian."""
    rng = rng_from(seed)
    g = _gaussian(dim, rng, dim)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, layout)


def state_with_overlap(overlap: float, seed: SeedLike = None) -> tuple[StateVector, StateVector]:
    """Random qubit pair with |<psi0|psi1>| = overlap and a random relative phase."""
    if not 0 <= overlap <= 1:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")
    rng = rng_from(seed)
    frame = haar_random_frame(2, 2, rng)
    phase = np.exp(2j * np.pi * rng.uniform())
    v1 = phase * (overlap * frame[:, 0] + np.sqrt(1 - overlap**2) * frame[:, 1])
    return StateVector(frame[:, 0]), StateVector(v1)
