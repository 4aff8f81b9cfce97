"""Constructive proof machinery for compatible state assignments.

Given two compatible density matrices, this module finds a pure state
common to both supports, builds decompositions of each state that share it,
assembles the tripartite witness vector whose local ancilla measurements
reproduce each observer's assignment, and simulates that measurement
protocol to verify the round trip numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChiOutsideSupport, Incompatible
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    hermitian_eigendecompose,
    projector_from,
    support_of,
)
from .states import (
    DensityMatrix,
    PureState,
    basis_state,
    partial_trace,
    project_and_renormalize,
    validate_density,
)
from .compat import check_bfm

__all__ = [
    "SharedDecomposition",
    "WitnessState",
    "ProtocolResult",
    "choose_common_state",
    "max_common_weight",
    "build_shared_decomposition",
    "build_witness",
    "simulate_protocol",
]

Component = tuple[float, PureState]


@dataclass(frozen=True, eq=False)
class SharedDecomposition:
    """Decompositions of two density matrices sharing one pure state.

    ``rho_a = p0 |chi><chi| + sum_i p_i |psi_i><psi_i|`` with the ``rest_a``
    terms carrying the ``(p_i, |psi_i>)`` pairs, and likewise ``rho_b`` with
    ``q0`` and ``rest_b``.  Both leading weights are strictly positive.
    """

    chi: PureState
    p0: float
    q0: float
    rest_a: tuple[Component, ...]
    rest_b: tuple[Component, ...]

    def __post_init__(self):
        object.__setattr__(self, "p0", float(self.p0))
        object.__setattr__(self, "q0", float(self.q0))
        object.__setattr__(self, "rest_a", tuple((float(w), s) for w, s in self.rest_a))
        object.__setattr__(self, "rest_b", tuple((float(w), s) for w, s in self.rest_b))
        if self.p0 <= 0 or self.q0 <= 0:
            raise ValueError(f"shared weights must be positive, got {self.p0}, {self.q0}")
        for name, head, rest in (("a", self.p0, self.rest_a), ("b", self.q0, self.rest_b)):
            if any(w <= 0 for w, _ in rest):
                raise ValueError(f"rest_{name} weights must be strictly positive")
            if any(s.dim != self.chi.dim for _, s in rest):
                raise ValueError(f"rest_{name} states must match the shared-state dimension")
            total = head + sum(w for w, _ in rest)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"weights of decomposition {name} sum to {total!r}")

    @property
    def dim(self) -> int:
        return self.chi.dim

    def rho_a(self) -> DensityMatrix:
        """Reconstruct the first state from its decomposition."""
        return self._reconstruct(self.p0, self.rest_a, "A")

    def rho_b(self) -> DensityMatrix:
        """Reconstruct the second state from its decomposition."""
        return self._reconstruct(self.q0, self.rest_b, "B")

    def _reconstruct(self, head: float, rest: tuple[Component, ...], label: str) -> DensityMatrix:
        rho = head * self.chi.projector()
        for w, s in rest:
            rho = rho + w * s.projector()
        return validate_density(rho, label=label)


@dataclass(frozen=True, eq=False)
class WitnessState:
    """Tripartite pure state on ancilla_A (x) ancilla_B (x) system.

    The ``normalization`` field is the scale applied to the raw
    superposition, so ``1/normalization^2 = 1/p0 + 1/q0 - 1``.  Ancilla
    dimensions are minimal: ancilla A indexes the second decomposition's
    extra terms, ancilla B the first's.
    """

    dims: tuple[int, int, int]
    amplitudes: PureState
    normalization: float
    decomposition: SharedDecomposition

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "normalization", float(self.normalization))
        dim_a, dim_b, dim_s = self.dims
        d = self.decomposition
        if dim_a != 1 + len(d.rest_b):
            raise ValueError(f"ancilla A dimension {dim_a} != 1 + {len(d.rest_b)}")
        if dim_b != 1 + len(d.rest_a):
            raise ValueError(f"ancilla B dimension {dim_b} != 1 + {len(d.rest_a)}")
        if dim_s != d.dim:
            raise ValueError(f"system dimension {dim_s} != shared-state dimension {d.dim}")
        if self.amplitudes.dim != dim_a * dim_b * dim_s:
            raise ValueError("amplitude vector does not match recorded dimensions")
        if self.normalization <= 0:
            raise ValueError("normalization must be positive")
        identity = 1.0 / d.p0 + 1.0 / d.q0 - 1.0
        if abs(1.0 / self.normalization**2 - identity) > 1e-9:
            raise ValueError(
                f"normalization identity violated: 1/N^2 = {1.0 / self.normalization ** 2!r}, "
                f"1/p0 + 1/q0 - 1 = {identity!r}"
            )


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    """Outcome of simulating the two-ancilla measurement protocol.

    ``rho_alice``/``rho_bob`` are the system states inferred by each
    observer after seeing outcome 0 on their own ancilla (without sharing
    results); ``joint`` is the system state after both outcomes are pooled.
    The outcome probabilities are reported as well; only positivity is
    guaranteed for them.
    """

    rho_alice: DensityMatrix
    rho_bob: DensityMatrix
    joint: PureState
    p_alice: float
    p_bob: float
    p_both: float


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(x for c in v for x in (c.real, c.imag))


def choose_common_state(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances | None = None
) -> PureState:
    """Pick a deterministic unit vector from the support intersection.

    Among the intersection basis vectors, takes the one with the largest
    ``min(<chi|rho_a|chi>, <chi|rho_b|chi>)`` (keeping the extractable
    weights away from the numerical floor); exact ties go to the
    lexicographically smallest phase-fixed vector.

    Raises
    ------
    Incompatible
        If the support intersection is trivial.
    """
    tol = tol or DEFAULT_TOLERANCES
    report = check_bfm([a, b], tol)
    if not report.verdict_bfm:
        raise Incompatible("support intersection is trivial; no common state exists")
    basis = report.intersection_basis.basis
    candidates = []
    for k in range(basis.shape[1]):
        v = basis[:, k]
        score = min(
            float(np.vdot(v, a.matrix @ v).real),
            float(np.vdot(v, b.matrix @ v).real),
        )
        candidates.append((-score, _lex_key(v), k))
    candidates.sort()
    return PureState(basis[:, candidates[0][2]])


def max_common_weight(
    rho: DensityMatrix, chi: PureState, tol: Tolerances | None = None
) -> float:
    """Largest weight with which ``|chi><chi|`` fits inside ``rho``.

    Computed as ``1 / <chi|rho^+|chi>`` with the pseudo-inverse taken on
    the support eigenbasis (same zero cutoff as everywhere else).  At this
    weight the remainder ``rho - p |chi><chi|`` touches the PSD boundary;
    any larger weight breaks positivity.

    Raises
    ------
    ChiOutsideSupport
        If ``chi`` has a component outside the support of ``rho``.
    """
    tol = tol or DEFAULT_TOLERANCES
    if rho.dim != chi.dim:
        raise ChiOutsideSupport(
            f"state dimension {chi.dim} does not match rho dimension {rho.dim}"
        )
    supp = support_of(rho.matrix, tol)
    residual = projector_from(supp) @ chi.amplitudes - chi.amplitudes
    if float(np.linalg.norm(residual)) > 1e-8:
        raise ChiOutsideSupport(
            f"chi leaves the support by {float(np.linalg.norm(residual)):.3e}"
        )
    values, vectors = hermitian_eigendecompose(rho.matrix, tol)
    overlaps = vectors.conj().T @ chi.amplitudes
    inv_quadratic = 0.0
    for lam, c in zip(values, overlaps):
        if lam > tol.eigenvalue_zero_tol:
            inv_quadratic += float(abs(c) ** 2) / float(lam)
    return 1.0 / inv_quadratic


def _remainder_terms(
    rho: DensityMatrix, chi: PureState, weight: float, tol: Tolerances
) -> tuple[Component, ...]:
    """Eigen-ensemble of ``rho - weight |chi><chi|`` with boundary clipping."""
    remainder = rho.matrix - weight * chi.projector()
    values, vectors = hermitian_eigendecompose(remainder, tol)
    values = np.where((values >= -1e-9) & (values <= 0.0), 0.0, values)
    return tuple(
        (float(values[k]), PureState(vectors[:, k]))
        for k in range(values.size)
        if values[k] > tol.eigenvalue_zero_tol
    )


def build_shared_decomposition(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances | None = None
) -> SharedDecomposition:
    """Decompose a compatible pair around a common pure state.

    The shared weight in each state is the maximal extractable one, which
    keeps the ancillas minimal and the witness coefficients
    well-conditioned; the remainders are decomposed into their eigen
    ensembles.
    """
    tol = tol or DEFAULT_TOLERANCES
    chi = choose_common_state(a, b, tol)
    p0 = min(max_common_weight(a, chi, tol), 1.0)
    q0 = min(max_common_weight(b, chi, tol), 1.0)
    return SharedDecomposition(
        chi=chi,
        p0=p0,
        q0=q0,
        rest_a=_remainder_terms(a, chi, p0, tol),
        rest_b=_remainder_terms(b, chi, q0, tol),
    )


def build_witness(d: SharedDecomposition) -> WitnessState:
    """Assemble the tripartite witness vector for a shared decomposition.

    The raw superposition puts the shared state under both ancillas' zero
    outcome, each extra term of the first decomposition under a distinct
    ancilla-B label with coefficient ``sqrt(p_i/p0)``, and each extra term
    of the second under a distinct ancilla-A label with ``sqrt(q_j/q0)``.
    """
    dim_a = 1 + len(d.rest_b)
    dim_b = 1 + len(d.rest_a)
    dim_s = d.dim
    raw = np.zeros((dim_a, dim_b, dim_s), dtype=complex)
    raw[0, 0, :] = d.chi.amplitudes
    for i, (p_i, psi_i) in enumerate(d.rest_a, start=1):
        raw[0, i, :] = np.sqrt(p_i / d.p0) * psi_i.amplitudes
    for j, (q_j, phi_j) in enumerate(d.rest_b, start=1):
        raw[j, 0, :] = np.sqrt(q_j / d.q0) * phi_j.amplitudes
    scale = 1.0 / float(np.linalg.norm(raw))
    return WitnessState(
        dims=(dim_a, dim_b, dim_s),
        amplitudes=PureState(scale * raw.reshape(-1)),
        normalization=scale,
        decomposition=d,
    )


def simulate_protocol(
    w: WitnessState, tol: Tolerances | None = None
) -> ProtocolResult:
    """Run the two-ancilla measurement protocol on a witness state.

    Alice projects ancilla A onto outcome 0 and, not knowing Bob's result,
    traces out ancilla B; Bob does the mirror image.  Pooling both zero
    outcomes leaves the pure system state.  For a witness built by
    :func:`build_witness` these reproduce the decomposed states.

    Raises
    ------
    ZeroProbabilityOutcome
        Cannot occur for a valid witness; signals corrupted input.
    """
    tol = tol or DEFAULT_TOLERANCES
    dim_a, dim_b, dim_s = w.dims
    psi = w.amplitudes

    p_alice, cond_bs = project_and_renormalize(
        psi, w.dims, 0, basis_state(dim_a, 0), tol
    )
    rho_bs = validate_density(cond_bs.projector(), tol, label="A")
    rho_alice = partial_trace(rho_bs, (dim_b, dim_s), {1}, tol)

    p_bob, cond_as = project_and_renormalize(
        psi, w.dims, 1, basis_state(dim_b, 0), tol
    )
    rho_as = validate_density(cond_as.projector(), tol, label="B")
    rho_bob = partial_trace(rho_as, (dim_a, dim_s), {1}, tol)

    p_second, joint = project_and_renormalize(
        cond_bs, (dim_b, dim_s), 0, basis_state(dim_b, 0), tol
    )
    return ProtocolResult(
        rho_alice=rho_alice,
        rho_bob=rho_bob,
        joint=joint,
        p_alice=p_alice,
        p_bob=p_bob,
        p_both=p_alice * p_second,
    )
