"""Shared random-state generators for the test suite.

Density matrices are drawn as ``G G^dag / tr(G G^dag)`` with complex
Gaussian ``G`` of chosen rank.  Support eigenvalues get a floor so the PSD
boundary and product norms stay well separated from the tolerances under
test; every generator takes an explicit ``numpy.random.Generator`` so runs
are reproducible from seeds.
"""

from __future__ import annotations

import numpy as np

from qcompat import DensityMatrix, PureState, validate_density


def random_pure(rng: np.random.Generator, dim: int) -> PureState:
    """Haar-random pure state."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityMatrix:
    """Random density matrix of the requested rank."""
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return validate_density(m / np.trace(m).real)


def random_density_conditioned(
    rng: np.random.Generator, dim: int, rank: int | None = None
) -> DensityMatrix:
    """Random density matrix whose support eigenvalues are bounded away from 0."""
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    frame = random_unitary(rng, dim)[:, :rank]
    weights = rng.uniform(0.1, 1.1, size=rank)
    weights /= weights.sum()
    m = (frame * weights) @ frame.conj().T
    return validate_density(m / np.trace(m).real)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_subspace(rng: np.random.Generator, dim: int, k: int) -> np.ndarray:
    """Orthonormal (dim, k) frame, uniformly random."""
    return random_unitary(rng, dim)[:, :k]


def compatible_pair(
    rng: np.random.Generator, dim: int, weight_floor: float = 0.2
) -> tuple[DensityMatrix, DensityMatrix, PureState]:
    """Two states built by mixing a shared pure state into random ensembles.

    The shared state enters each mixture with weight at least
    ``weight_floor``, so the pair is compatible by construction and the
    common direction carries substantial probability in both.
    """
    chi = random_pure(rng, dim)
    states = []
    for _ in range(2):
        p = float(rng.uniform(weight_floor, 0.8))
        background = random_density_conditioned(rng, dim).matrix
        m = p * chi.projector() + (1.0 - p) * background
        states.append(validate_density(m / np.trace(m).real))
    return states[0], states[1], chi
