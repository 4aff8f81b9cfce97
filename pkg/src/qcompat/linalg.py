"""Dense complex matrix arithmetic and subspace algebra.

Everything below the physics layer: Hermitian eigendecomposition with a
deterministic ordering and phase convention, tolerance-aware support/null
splitting, orthonormal subspaces, and subspace intersection.

Matrices are square ``numpy.ndarray`` values of dtype complex128, stored
row-major.  All functions are pure; returned arrays are read-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, NegativeEigenvalue, NotHermitian, NotSquare

__all__ = [
    "Tolerances",
    "Subspace",
    "as_complex_matrix",
    "max_abs",
    "hermitian_eigendecompose",
    "support_of",
    "null_of",
    "intersect",
    "projector_from",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the toolkit.

    All states are trace-normalized, so eigenvalues and matrix entries are
    O(1) and absolute thresholds are meaningful.

    Attributes
    ----------
    hermiticity_tol : float
        Max allowed entry of ``m - m^dag``.
    eigenvalue_zero_tol : float
        Eigenvalues at or below this count as zero (support membership).
    trace_tol : float
        Max allowed deviation of a density-matrix trace from one.
    overlap_tol : float
        Threshold for intersection eigenvalues (``> 1 - overlap_tol``) and
        for the commutator/product norms of the pairwise criteria.
    """

    hermiticity_tol: float = 1e-9
    eigenvalue_zero_tol: float = 1e-9
    trace_tol: float = 1e-9
    overlap_tol: float = 1e-7

    def __post_init__(self):
        for name in ("hermiticity_tol", "eigenvalue_zero_tol", "trace_tol", "overlap_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a complex128 matrix, rejecting non-2D or non-finite input."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def max_abs(m: np.ndarray) -> float:
    """Max-entry norm ``max_ij |m_ij|`` (0 for empty arrays)."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m)))


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^D given by an orthonormal basis.

    ``basis`` has shape ``(ambient_dim, dimension)``; columns are the basis
    vectors.  A zero-dimensional (trivial) subspace has shape ``(D, 0)``.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis must have shape ({self.ambient_dim}, k), got {b.shape}"
            )
        if b.shape[1] > self.ambient_dim:
            raise ValueError("more basis vectors than ambient dimensions")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis contains non-finite entries")
        gram = b.conj().T @ b
        if max_abs(gram - np.eye(b.shape[1])) > 1e-10:
            raise ValueError("basis columns are not orthonormal to 1e-10")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


def _phase_fixed(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    idx = int(np.argmax(np.abs(v)))
    a = v[idx]
    mag = abs(a)
    if mag == 0.0:
        return v
    return v * (a.conjugate() / mag)


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(x for c in v for x in (c.real, c.imag))


def hermitian_eigendecompose(
    m, tol: Tolerances | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a Hermitian matrix with a deterministic convention.

    Eigenvalues come back sorted descending; exact ties are ordered by
    lexicographic comparison of the phase-fixed eigenvectors.  Each
    eigenvector's largest-magnitude entry is made real and positive, so
    identical inputs produce bit-identical outputs.

    Returns
    -------
    (eigenvalues, eigenvectors)
        ``eigenvalues`` is a 1-D float array, ``eigenvectors`` the matching
        ``(D, D)`` array of orthonormal column vectors.

    Raises
    ------
    NotSquare
        If ``m`` is not square.
    NotHermitian
        If ``max |m - m^dag|`` exceeds ``hermiticity_tol``.
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix has shape {a.shape}")
    deviation = max_abs(a - a.conj().T)
    if deviation > tol.hermiticity_tol:
        raise NotHermitian([("hermiticity", deviation, tol.hermiticity_tol)])
    # symmetrize: exact for exactly-Hermitian input, kills tolerated noise
    h = (a + a.conj().T) / 2
    values, vectors = np.linalg.eigh(h)
    cols = [_phase_fixed(vectors[:, k]) for k in range(vectors.shape[1])]
    order = sorted(
        range(len(values)), key=lambda k: (-values[k], _lex_key(cols[k]))
    )
    out_values = np.array([float(values[k]) for k in order])
    out_vectors = np.column_stack([cols[k] for k in order]) if order else np.zeros((0, 0))
    out_values.setflags(write=False)
    return out_values, _frozen(out_vectors)


def _split_spectrum(m, tol: Tolerances) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigendecompose and check PSD; returns (values, vectors, above_mask)."""
    values, vectors = hermitian_eigendecompose(m, tol)
    lam_min = float(values[-1]) if values.size else 0.0
    if lam_min < -tol.eigenvalue_zero_tol:
        raise NegativeEigenvalue([("positivity", lam_min, tol.eigenvalue_zero_tol)])
    return values, vectors, values > tol.eigenvalue_zero_tol


def support_of(m, tol: Tolerances | None = None) -> Subspace:
    """Span of the eigenvectors with eigenvalue above ``eigenvalue_zero_tol``.

    Requires a Hermitian PSD input; the orthogonal complement of the result
    is exactly :func:`null_of` of the same matrix.
    """
    tol = tol or DEFAULT_TOLERANCES
    values, vectors, above = _split_spectrum(m, tol)
    return Subspace(vectors.shape[0], vectors[:, above])


def null_of(m, tol: Tolerances | None = None) -> Subspace:
    """Span of the eigenvectors with eigenvalue at or below the zero cutoff."""
    tol = tol or DEFAULT_TOLERANCES
    values, vectors, above = _split_spectrum(m, tol)
    return Subspace(vectors.shape[0], vectors[:, ~above])


def projector_from(s: Subspace) -> np.ndarray:
    """Orthogonal projector ``P = sum_k b_k b_k^dag`` onto the subspace."""
    if s.dimension == 0:
        return np.zeros((s.ambient_dim, s.ambient_dim), dtype=complex)
    return s.basis @ s.basis.conj().T


def intersect(a: Subspace, b: Subspace, *rest: Subspace, tol: Tolerances | None = None) -> Subspace:
    """Intersection of two or more subspaces.

    Computed as the eigenspace of the mean projector ``(P_a + P_b) / 2``
    with eigenvalues above ``1 - overlap_tol``: those eigenvalues equal 1
    exactly on the intersection and ``cos^2(theta/2) < 1`` along principal
    angles ``theta > 0`` outside it.  Additional subspaces are folded in
    left to right.

    Raises
    ------
    AmbientMismatch
        If the subspaces live in spaces of different dimension.
    """
    tol = tol or DEFAULT_TOLERANCES
    result = _intersect_pair(a, b, tol)
    for s in rest:
        result = _intersect_pair(result, s, tol)
    return result


def _intersect_pair(a: Subspace, b: Subspace, tol: Tolerances) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    mean = (projector_from(a) + projector_from(b)) / 2
    values, vectors = hermitian_eigendecompose(mean, tol)
    keep = values > 1.0 - tol.overlap_tol
    return Subspace(a.ambient_dim, vectors[:, keep])
