"""Shannon entropy, stochastic matrices and the classical shadow of a channel.

Stochastic matrices follow the column convention: B is stochastic when its
columns sum to one and acts on probability column vectors from the left, so
preservation questions read ``H(Bp) = H(p)`` and the fixed-point condition is
``B^T B p = p``.  The Kraus matrix of a channel,
``B(phi)_ij = sum_mu |<i| M_mu |j>|^2``, is the stochastic matrix describing
the channel's action on basis-diagonal states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, apply_channel, classify, kraus_channel
from .errors import (
    DimensionMismatchError,
    NotBistochasticError,
    NotDiagonalError,
    NotPositiveError,
    NotSquareError,
    NotStochasticError,
    ValidationError,
)
from .states import DensityMatrix, frozen_array
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "ProbabilityVector",
    "StochasticMatrix",
    "CorollaryReport",
    "BridgeReport",
    "probability_vector",
    "stochastic_matrix",
    "shannon_entropy",
    "classical_relative_entropy",
    "kraus_matrix",
    "channel_from_bistochastic",
    "corollary_check",
    "bridge_check",
]


@dataclass(frozen=True)
class ProbabilityVector:
    dim: int
    entries: np.ndarray


@dataclass(frozen=True)
class StochasticMatrix:
    """Non-negative square matrix with classification flags."""

    dim: int
    matrix: np.ndarray
    column_stochastic: bool
    bistochastic: bool
    column_residual: float
    row_residual: float


def probability_vector(entries, tol: ToleranceConfig = DEFAULT_TOL) -> ProbabilityVector:
    """Validate entries as a probability vector; entries in [-tol.psd, 0) are
    clipped to zero."""
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("probability vector must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("probability vector contains non-finite entries")
    if np.min(arr) < -tol.psd:
        raise NotPositiveError(f"entry {np.min(arr):.3e} below -{tol.psd:.1e}")
    arr = np.clip(arr, 0.0, None)
    total = float(arr.sum())
    if abs(total - 1.0) > tol.eq:
        raise ValidationError(f"entries sum to {total!r}, not 1")
    return ProbabilityVector(dim=arr.size, entries=frozen_array(arr, dtype=float))


def stochastic_matrix(m, tol: ToleranceConfig = DEFAULT_TOL) -> StochasticMatrix:
    """Validate a non-negative matrix and derive its stochasticity flags."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix contains non-finite entries")
    if np.min(arr) < -tol.psd:
        raise NotPositiveError(f"entry {np.min(arr):.3e} below -{tol.psd:.1e}")
    arr = np.clip(arr, 0.0, None)
    col_res = float(np.max(np.abs(arr.sum(axis=0) - 1.0))) if arr.size else 0.0
    row_res = float(np.max(np.abs(arr.sum(axis=1) - 1.0))) if arr.size else 0.0
    column_stochastic = col_res <= tol.eq
    return StochasticMatrix(
        dim=arr.shape[0],
        matrix=frozen_array(arr, dtype=float),
        column_stochastic=column_stochastic,
        bistochastic=column_stochastic and row_res <= tol.eq,
        column_residual=col_res,
        row_residual=row_res,
    )


def shannon_entropy(p: ProbabilityVector) -> float:
    """-sum p_i log2 p_i in bits, with 0*log2(0) := 0."""
    pos = p.entries[p.entries > 0.0]
    return float(-(pos * np.log2(pos)).sum() + 0.0)


def classical_relative_entropy(
    p: ProbabilityVector, q: ProbabilityVector, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """sum p_i (log2 p_i - log2 q_i), or +inf when p puts mass outside q's support."""
    if p.dim != q.dim:
        raise DimensionMismatchError(f"vector dims differ: {p.dim} vs {q.dim}")
    if np.any((p.entries > tol.psd) & (q.entries <= tol.psd)):
        return math.inf
    mask = p.entries > 0.0
    pm = p.entries[mask]
    qm = q.entries[mask]
    return float((pm * (np.log2(pm) - np.log2(qm))).sum() + 0.0)


def kraus_matrix(phi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL) -> StochasticMatrix:
    """Entrywise B(phi)_ij = sum_mu |M_mu[i, j]|^2.

    Column-stochastic for stochastic channels and bistochastic for
    bi-stochastic ones; satisfies B(adjoint(phi)) = B(phi)^T.  Adjoints of
    stochastic channels are unital rather than trace preserving, so unital
    families are accepted too (their matrix is row-stochastic); a channel
    that is neither is rejected.
    """
    cls = classify(phi, tol)
    if not (cls.stochastic or cls.unital):
        raise NotStochasticError(
            f"Kraus matrix needs a trace-preserving (or unital) channel; "
            f"residuals {cls.stochastic_residual:.3e} / {cls.unital_residual:.3e}"
        )
    b = np.zeros((phi.dim, phi.dim))
    for m in phi.kraus:
        b += np.abs(m) ** 2
    return stochastic_matrix(b, tol)


def channel_from_bistochastic(
    t: StochasticMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Bistochastic channel with Kraus family {sqrt(T_ji) |j><i|}.

    The channel maps diag(p) to diag(T p) and its Kraus matrix is T itself;
    terms with T_ji <= tol.psd are dropped (zero operators do not change the
    channel).
    """
    if not t.bistochastic:
        raise NotBistochasticError(
            f"matrix is not bistochastic; column residual {t.column_residual:.3e}, "
            f"row residual {t.row_residual:.3e}"
        )
    n = t.dim
    ops = []
    for j in range(n):
        for i in range(n):
            if t.matrix[j, i] > tol.psd:
                op = np.zeros((n, n), dtype=complex)
                op[j, i] = math.sqrt(t.matrix[j, i])
                ops.append(op)
    return kraus_channel(ops, tol)


@dataclass(frozen=True)
class CorollaryReport:
    """Entropy preservation vs the doubly-stochastic fixed-point condition."""

    entropy_in: float
    entropy_out: float
    entropy_gap: float
    fixed_point_residual: float
    entropy_preserved: bool
    fixed_point: bool
    agreement: bool

    def as_dict(self) -> dict:
        return {
            "entropy_in_bits": self.entropy_in,
            "entropy_out_bits": self.entropy_out,
            "entropy_gap_bits": self.entropy_gap,
            "fixed_point_residual": self.fixed_point_residual,
            "entropy_preserved": self.entropy_preserved,
            "fixed_point": self.fixed_point,
            "agreement": self.agreement,
        }


def corollary_check(
    b: StochasticMatrix,
    p: ProbabilityVector,
    tol: ToleranceConfig = DEFAULT_TOL,
    entropy_tol: float | None = None,
    residual_tol: float | None = None,
) -> CorollaryReport:
    """Check ``H(Bp) = H(p)`` against ``B^T B p = p`` and report both residuals.

    Verdict thresholds default to tol.eq; both can be pinned explicitly.
    """
    if not b.bistochastic:
        raise NotBistochasticError(
            f"matrix is not bistochastic; column residual {b.column_residual:.3e}, "
            f"row residual {b.row_residual:.3e}"
        )
    if b.dim != p.dim:
        raise DimensionMismatchError(f"dims differ: matrix {b.dim}, vector {p.dim}")
    entropy_tol = tol.eq if entropy_tol is None else entropy_tol
    residual_tol = tol.eq if residual_tol is None else residual_tol
    q = probability_vector(b.matrix @ p.entries, tol)
    h_in = shannon_entropy(p)
    h_out = shannon_entropy(q)
    gap = abs(h_out - h_in)
    residual = float(np.linalg.norm(b.matrix.T @ (b.matrix @ p.entries) - p.entries))
    preserved = gap <= entropy_tol
    fixed = residual <= residual_tol
    return CorollaryReport(
        entropy_in=h_in,
        entropy_out=h_out,
        entropy_gap=gap,
        fixed_point_residual=residual,
        entropy_preserved=preserved,
        fixed_point=fixed,
        agreement=preserved == fixed,
    )


@dataclass(frozen=True)
class BridgeReport:
    """Diagonal of phi(rho) compared against B(phi) applied to diag(rho)."""

    input_probabilities: tuple[float, ...]
    output_probabilities: tuple[float, ...]
    kraus_matrix_probabilities: tuple[float, ...]
    residual: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "input_probabilities": list(self.input_probabilities),
            "output_probabilities": list(self.output_probabilities),
            "kraus_matrix_probabilities": list(self.kraus_matrix_probabilities),
            "residual": self.residual,
            "passed": self.passed,
        }


def bridge_check(
    phi: KrausChannel, rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> BridgeReport:
    """For basis-diagonal rho, verify diag(phi(rho)) == B(phi) diag(rho).

    Rejects states with off-diagonal mass above tol.eq: the identity is only
    claimed for states diagonal in the computational basis, and we do not
    extend it.
    """
    off = rho.matrix - np.diag(np.diagonal(rho.matrix))
    off_mass = float(np.linalg.norm(off))
    if off_mass > tol.eq:
        raise NotDiagonalError(
            f"state has off-diagonal mass {off_mass:.3e}; diagonal input required"
        )
    p = probability_vector(np.real(np.diagonal(rho.matrix)), tol)
    b = kraus_matrix(phi, tol)
    q_direct = np.real(np.diagonal(apply_channel(phi, rho.matrix)))
    q_via_b = b.matrix @ p.entries
    residual = float(np.max(np.abs(q_direct - q_via_b)))
    return BridgeReport(
        input_probabilities=tuple(float(x) for x in p.entries),
        output_probabilities=tuple(float(x) for x in q_direct),
        kraus_matrix_probabilities=tuple(float(x) for x in q_via_b),
        residual=residual,
        passed=residual <= tol.eq,
    )
