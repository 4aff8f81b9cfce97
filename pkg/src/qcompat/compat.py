"""Compatibility checks for collections of density-matrix assignments.

Two (or more) density matrices are *compatible* when they could describe
one and the same system: equivalently, when the intersection of their
supports is nontrivial.  This module implements that support-intersection
criterion, the two classical pairwise criteria it supersedes (commutation
and non-orthogonality), the pure-state special case, and the constraint a
pooled joint state must satisfy (its support confined to the intersection,
i.e. every observer's null space stays null).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, FewerThanTwoStates, NotPure
from .linalg import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    hermitian_eigendecompose,
    intersect,
    max_abs,
    projector_from,
    support_of,
    null_of,
)
from .states import DensityMatrix

__all__ = [
    "CompatReport",
    "NullSpaceLeak",
    "JointConstraintReport",
    "check_pi",
    "check_pii",
    "check_bfm",
    "check_pure_pair",
    "verify_joint",
]


@dataclass(frozen=True, eq=False)
class CompatReport:
    """Outcome of a support-intersection compatibility check.

    ``verdict_bfm`` is the support-intersection verdict and always equals
    ``intersection_dim > 0``.  For exactly two states the pairwise fields
    describe that pair; for more states they are the conjunction over all
    pairs (an extension beyond the two-observer criteria, flagged by
    ``pairwise_conjunction``), with ``commutator_norm`` the worst pair and
    ``product_norm`` the weakest pair.
    """

    verdict_bfm: bool
    verdict_pi: bool
    verdict_pii: bool
    intersection_dim: int
    intersection_basis: Subspace
    commutator_norm: float
    product_norm: float
    tolerances_used: Tolerances
    n_states: int = 2
    pairwise_conjunction: bool = False

    def __post_init__(self):
        if self.verdict_bfm != (self.intersection_dim > 0):
            raise ValueError("verdict_bfm must equal (intersection_dim > 0)")
        if self.intersection_dim != self.intersection_basis.dimension:
            raise ValueError("intersection_dim must match the basis dimension")


def _require_equal_dims(states: Sequence[DensityMatrix]) -> int:
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatch(f"states have differing dimensions {sorted(dims)}")
    return dims.pop()


def check_pi(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances | None = None
) -> tuple[bool, float]:
    """Commutation criterion: do the two assignments commute?

    Returns the verdict together with ``max |rho_a rho_b - rho_b rho_a|``.
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_equal_dims([a, b])
    commutator = a.matrix @ b.matrix - b.matrix @ a.matrix
    norm = max_abs(commutator)
    return norm <= tol.overlap_tol, norm


def check_pii(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances | None = None
) -> tuple[bool, float]:
    """Non-orthogonality criterion: is the operator product nonzero?

    Returns the verdict together with ``max |rho_a rho_b|``.
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_equal_dims([a, b])
    norm = max_abs(a.matrix @ b.matrix)
    return norm > tol.overlap_tol, norm


def check_bfm(
    states: Sequence[DensityMatrix], tol: Tolerances | None = None
) -> CompatReport:
    """Support-intersection compatibility for two or more assignments.

    The verdict is positive iff the supports of all states share at least
    one direction.  The returned basis spans the full intersection, so
    ``intersection_dim`` doubles as the dimension budget any pooled joint
    state's support must fit inside.
    """
    tol = tol or DEFAULT_TOLERANCES
    if len(states) < 2:
        raise FewerThanTwoStates(
            f"compatibility needs at least two state assignments, got {len(states)}"
        )
    _require_equal_dims(states)
    supports = [support_of(s.matrix, tol) for s in states]
    common = reduce(lambda x, y: intersect(x, y, tol=tol), supports)

    pi_verdicts, pii_verdicts = [], []
    commutator_norms, product_norms = [], []
    for x, y in combinations(states, 2):
        ok_pi, c_norm = check_pi(x, y, tol)
        ok_pii, p_norm = check_pii(x, y, tol)
        pi_verdicts.append(ok_pi)
        pii_verdicts.append(ok_pii)
        commutator_norms.append(c_norm)
        product_norms.append(p_norm)

    return CompatReport(
        verdict_bfm=common.dimension > 0,
        verdict_pi=all(pi_verdicts),
        verdict_pii=all(pii_verdicts),
        intersection_dim=common.dimension,
        intersection_basis=common,
        commutator_norm=max(commutator_norms),
        product_norm=min(product_norms),
        tolerances_used=tol,
        n_states=len(states),
        pairwise_conjunction=len(states) > 2,
    )


def _principal_vector(rho: DensityMatrix, tol: Tolerances) -> np.ndarray:
    """Top eigenvector of a rank-1 state; raises NotPure otherwise."""
    values, vectors = hermitian_eigendecompose(rho.matrix, tol)
    rank = int(np.sum(values > tol.eigenvalue_zero_tol))
    if rank != 1:
        raise NotPure(f"state has rank {rank}, expected 1")
    return vectors[:, 0]


def check_pure_pair(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances | None = None
) -> bool:
    """Pure-state special case: two rank-1 assignments must be identical.

    True iff ``|<psi_a|psi_b>|^2 >= 1 - overlap_tol`` (global phase is
    irrelevant).  Agrees with :func:`check_bfm` on rank-1 pairs.
    """
    tol = tol or DEFAULT_TOLERANCES
    _require_equal_dims([a, b])
    va = _principal_vector(a, tol)
    vb = _principal_vector(b, tol)
    return float(abs(np.vdot(va, vb)) ** 2) >= 1.0 - tol.overlap_tol


@dataclass(frozen=True)
class NullSpaceLeak:
    """How much of a joint state lives in one observer's null space.

    ``leaked_norm`` is the max-entry norm of the joint state restricted to
    the observer's null space; any zero-probability outcome of the observer
    must stay at zero probability under the joint assignment, so this norm
    must vanish for an admissible joint state.
    """

    observer_index: int
    label: str | None
    null_dim: int
    leaked_norm: float


@dataclass(frozen=True)
class JointConstraintReport:
    """Diagnostics from :func:`verify_joint`.

    ``leakage`` is ``max |(I - P_common) P_joint|``: how far the joint
    support sticks out of the common support intersection.
    """

    leakage: float
    per_observer: tuple[NullSpaceLeak, ...]


def verify_joint(
    joint: DensityMatrix,
    observers: Sequence[DensityMatrix],
    tol: Tolerances | None = None,
) -> tuple[bool, JointConstraintReport]:
    """Check that a pooled state assignment respects every observer.

    Admissible iff the support of ``joint`` lies inside the intersection of
    the observers' supports.  The report also measures, per observer, the
    joint state restricted to that observer's null space.
    """
    tol = tol or DEFAULT_TOLERANCES
    if not observers:
        raise ValueError("verify_joint needs at least one observer state")
    _require_equal_dims([joint, *observers])
    supports = [support_of(s.matrix, tol) for s in observers]
    common = reduce(lambda x, y: intersect(x, y, tol=tol), supports)

    p_common = projector_from(common)
    p_joint = projector_from(support_of(joint.matrix, tol))
    eye = np.eye(joint.dim, dtype=complex)
    leakage = max_abs((eye - p_common) @ p_joint)

    leaks = []
    for k, obs in enumerate(observers):
        null_basis = null_of(obs.matrix, tol).basis
        if null_basis.shape[1] == 0:
            restricted = 0.0
        else:
            restricted = max_abs(null_basis.conj().T @ joint.matrix @ null_basis)
        leaks.append(
            NullSpaceLeak(
                observer_index=k,
                label=obs.label,
                null_dim=null_basis.shape[1],
                leaked_norm=restricted,
            )
        )
    report = JointConstraintReport(leakage=leakage, per_observer=tuple(leaks))
    return leakage <= tol.overlap_tol, report
