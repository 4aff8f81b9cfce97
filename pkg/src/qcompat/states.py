"""Physically validated quantum states and multipartite operations.

Density matrices are validated on entry (Hermitian, positive semidefinite,
unit trace); everything downstream can then rely on physicality.  Composite
systems use the row-major subsystem convention: in a tensor product the
leftmost factor has the largest index stride, so ``|1>  (x) |+>`` occupies
basis indices 2 and 3 of the four-dimensional product space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyKeep,
    NotHermitian,
    NotPSD,
    NotSquare,
    TraceNotOne,
    ZeroProbabilityOutcome,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    as_complex_matrix,
    hermitian_eigendecompose,
    max_abs,
)

__all__ = [
    "PureState",
    "DensityMatrix",
    "Ensemble",
    "basis_state",
    "validate_density",
    "from_ensemble",
    "eigen_ensemble",
    "tensor",
    "partial_trace",
    "project_and_renormalize",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """A unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0:
            raise ValueError("pure state needs at least one amplitude")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes contain non-finite entries")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized: |amplitudes| = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        """Rank-1 projector ``|psi><psi|``."""
        return np.outer(self.amplitudes, self.amplitudes.conj())


def basis_state(dim: int, index: int) -> PureState:
    """Computational basis vector ``|index>`` in ``dim`` dimensions."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    a = np.zeros(dim, dtype=complex)
    a[index] = 1.0
    return PureState(a)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density operator with an optional observer label.

    Construct through :func:`validate_density`; the dataclass itself only
    checks structure, not physicality.
    """

    matrix: np.ndarray
    label: str | None = None

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise NotSquare(f"density matrix has shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """A convex mixture ``{(w_k, |xi_k>)}`` of pure states.

    Weights are strictly positive and sum to one within 1e-9; mixtures of
    mixed states are not representable (flatten them to pure components
    before constructing).
    """

    components: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        dims = {s.dim for _, s in comps}
        if len(dims) != 1:
            raise ValueError(f"ensemble components have mixed dimensions {sorted(dims)}")
        for w, _ in comps:
            if not 0.0 < w <= 1.0 + 1e-12:
                raise ValueError(f"weights must lie in (0, 1], got {w!r}")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0][1].dim


def validate_density(
    m, tol: Tolerances | None = None, label: str | None = None
) -> DensityMatrix:
    """Validate an operator as a physical density matrix.

    Measures all three invariants (hermiticity, positivity, unit trace) and
    rejects with the full violation list; the raised class corresponds to
    the first violated invariant in that order.

    Raises
    ------
    NotSquare
        Non-square input.
    NotHermitian, NotPSD, TraceNotOne
        Physicality violations; ``.violations`` carries every failed
        invariant with its measured magnitude.
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"density matrix must be square, got shape {a.shape}")

    violations: list[tuple[str, float, float]] = []
    hermiticity = max_abs(a - a.conj().T)
    if hermiticity > tol.hermiticity_tol:
        violations.append(("hermiticity", hermiticity, tol.hermiticity_tol))

    # eigenvalues of the Hermitian part; equal to those of a when Hermitian
    lam = np.linalg.eigvalsh((a + a.conj().T) / 2)
    lam_min = float(lam[0])
    if lam_min < -tol.eigenvalue_zero_tol:
        violations.append(("positivity lambda_min", lam_min, tol.eigenvalue_zero_tol))

    trace = complex(np.trace(a))
    if abs(trace - 1.0) > tol.trace_tol:
        violations.append(("trace", trace.real, tol.trace_tol))
        # a complex trace only happens alongside a hermiticity violation,
        # but the real part alone would hide what went wrong
        if abs(trace.imag) > tol.trace_tol:
            violations.append(("trace imaginary part", trace.imag, tol.trace_tol))

    if violations:
        first = violations[0][0]
        if first == "hermiticity":
            raise NotHermitian(violations)
        if first.startswith("positivity"):
            raise NotPSD(violations)
        raise TraceNotOne(violations)
    return DensityMatrix(a, label=label)


def from_ensemble(e: Ensemble, tol: Tolerances | None = None) -> DensityMatrix:
    """Mixture realization ``rho = sum_k w_k |xi_k><xi_k|``."""
    rho = np.zeros((e.dim, e.dim), dtype=complex)
    for w, s in e.components:
        rho += w * s.projector()
    return validate_density(rho, tol)


def eigen_ensemble(rho: DensityMatrix, tol: Tolerances | None = None) -> Ensemble:
    """Canonical ensemble of eigenvectors weighted by nonzero eigenvalues."""
    tol = tol or DEFAULT_TOLERANCES
    values, vectors = hermitian_eigendecompose(rho.matrix, tol)
    components = [
        (float(values[k]), PureState(vectors[:, k]))
        for k in range(values.size)
        if values[k] > tol.eigenvalue_zero_tol
    ]
    return Ensemble(tuple(components))


def tensor(states: Sequence[DensityMatrix] | Sequence[PureState]):
    """Kronecker product of states in the given subsystem order.

    All operands must be of the same kind; the result is that kind.  The
    leftmost operand has the largest index stride.
    """
    if not states:
        raise ValueError("tensor needs at least one operand")
    kinds = {type(s) for s in states}
    if len(kinds) != 1:
        raise TypeError("tensor operands must all be DensityMatrix or all PureState")
    if isinstance(states[0], PureState):
        out = states[0].amplitudes
        for s in states[1:]:
            out = np.kron(out, s.amplitudes)
        return PureState(out)
    out = states[0].matrix
    for s in states[1:]:
        out = np.kron(out, s.matrix)
    return validate_density(out)


def _check_dims(total: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != total:
        raise DimensionMismatch(
            f"product of subsystem dimensions {dims} is not the total dimension {total}"
        )
    return dims


def partial_trace(
    rho: DensityMatrix,
    dims: Sequence[int],
    keep: Iterable[int],
    tol: Tolerances | None = None,
) -> DensityMatrix:
    """Reduced state on the ``keep`` subsystems, tracing out the rest.

    ``dims`` lists the subsystem dimensions in tensor order; ``keep`` is the
    set of subsystem indices to retain (ascending order in the result).
    Keeping every subsystem returns the state unchanged.
    """
    dims = _check_dims(rho.dim, dims)
    n = len(dims)
    keep_sorted = sorted(set(int(k) for k in keep))
    if not keep_sorted:
        raise EmptyKeep("must keep at least one subsystem")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise DimensionMismatch(
            f"keep indices {keep_sorted} out of range for {n} subsystems"
        )
    t = rho.matrix.reshape(dims + dims)
    row_idx = list(range(n))
    col_idx = [n + i if i in keep_sorted else i for i in range(n)]
    out_idx = [i for i in keep_sorted] + [n + i for i in keep_sorted]
    reduced = np.einsum(t, row_idx + col_idx, out_idx)
    d_keep = int(np.prod([dims[i] for i in keep_sorted]))
    return validate_density(reduced.reshape(d_keep, d_keep), tol, label=rho.label)


def project_and_renormalize(
    psi: PureState,
    dims: Sequence[int],
    subsystem: int,
    outcome_vector: PureState,
    tol: Tolerances | None = None,
) -> tuple[float, PureState]:
    """Project one subsystem onto a pure outcome and renormalize.

    Returns the outcome probability
    ``p = |(<outcome| (x) I_rest) |psi>|^2`` together with the conditional
    state on the remaining subsystems.  Probabilities over a complete
    orthonormal outcome set sum to one.

    Raises
    ------
    DimensionMismatch
        If ``dims`` does not factor ``psi`` or the outcome dimension is
        wrong.
    ZeroProbabilityOutcome
        If ``p`` is at the numerical floor; the conditional state is then
        undefined (the measured probability rides on the exception).
    """
    tol = tol or DEFAULT_TOLERANCES
    dims = _check_dims(psi.dim, dims)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise DimensionMismatch(f"subsystem {subsystem} out of range for {n} factors")
    if outcome_vector.dim != dims[subsystem]:
        raise DimensionMismatch(
            f"outcome dimension {outcome_vector.dim} does not match subsystem "
            f"dimension {dims[subsystem]}"
        )
    t = psi.amplitudes.reshape(dims)
    contracted = np.tensordot(outcome_vector.amplitudes.conj(), t, axes=([0], [subsystem]))
    # measuring the only subsystem leaves a 0-d array; reshape(-1) makes it dim 1
    flat = np.asarray(contracted, dtype=complex).reshape(-1)
    p = float(np.vdot(flat, flat).real)
    if p <= tol.eigenvalue_zero_tol:
        raise ZeroProbabilityOutcome(p)
    return p, PureState(flat / np.sqrt(p))
