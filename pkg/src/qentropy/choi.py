"""The Choi isomorphism in both directions and the map entropy of a channel.

The Choi matrix of a map Theta on an N-dimensional system is
``J(Theta) = (Theta (x) id)(|Omega><Omega|)`` with the unnormalized maximally
entangled vector ``|Omega> = sum_i |ii>``; equivalently the block sum
``sum_ij Theta(|i><j|) (x) |i><j|``.  Tensor factors are ordered
(output, reference), so tracing out the first factor of J gives the identity
exactly when the channel is trace preserving, and tracing out the second
factor gives the identity exactly when it is unital.  Normalization by 1/N
happens only inside :func:`map_entropy`, keeping ``tr J = N`` for stochastic
channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, apply_channel, classify
from .errors import (
    NotHermitianError,
    NotPositiveError,
    NotSquareError,
    NotStochasticError,
    ValidationError,
)
from .states import (
    as_complex_matrix,
    entropy_of_matrix,
    frozen_array,
    hermitian_part,
    spectral_decomposition,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "ChoiMatrix",
    "maximally_entangled_projector",
    "choi_matrix",
    "choi_from_matrix",
    "channel_from_choi",
    "map_entropy",
    "partial_trace_output",
    "partial_trace_reference",
]


@dataclass(frozen=True)
class ChoiMatrix:
    """N^2 x N^2 Choi operator of a map on an N-dimensional system."""

    dim: int
    matrix: np.ndarray


def maximally_entangled_projector(n: int) -> np.ndarray:
    """|Omega><Omega| for the unnormalized |Omega> = sum_i |ii>."""
    omega = np.zeros(n * n, dtype=complex)
    omega[:: n + 1] = 1.0
    return np.outer(omega, omega.conj())


def choi_matrix(phi: KrausChannel) -> ChoiMatrix:
    """Block sum ``sum_ij phi(|i><j|) (x) |i><j|``."""
    n = phi.dim
    j = np.zeros((n * n, n * n), dtype=complex)
    unit = np.zeros((n, n), dtype=complex)
    for row in range(n):
        for col in range(n):
            unit[row, col] = 1.0
            j += np.kron(apply_channel(phi, unit), unit)
            unit[row, col] = 0.0
    return ChoiMatrix(dim=n, matrix=frozen_array(j))


def choi_from_matrix(m, tol: ToleranceConfig = DEFAULT_TOL) -> ChoiMatrix:
    """Wrap and validate an N^2 x N^2 matrix as a Choi operator."""
    arr = as_complex_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"Choi matrix must be square, got {arr.shape}")
    n = math.isqrt(arr.shape[0])
    if n * n != arr.shape[0]:
        raise ValidationError(f"Choi matrix size {arr.shape[0]} is not a perfect square")
    herm_dev = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_dev > tol.herm:
        raise NotHermitianError(f"hermiticity deviation {herm_dev:.3e} exceeds {tol.herm:.1e}")
    return ChoiMatrix(dim=n, matrix=frozen_array(arr))


def channel_from_choi(j: ChoiMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> KrausChannel:
    """Extract a Kraus family from a PSD Choi matrix.

    Eigenvectors with eigenvalue > tol.psd become Kraus operators (scaled by
    the square-rooted eigenvalue and reshaped row-major, the layout that makes
    ``choi_matrix(channel_from_choi(J)) == J``); an eigenvalue below -tol.psd
    witnesses a non-completely-positive map.
    """
    n = j.dim
    spec = spectral_decomposition(hermitian_part(j.matrix))
    if spec.eigenvalues[-1] < -tol.psd:
        raise NotPositiveError(
            f"Choi matrix has eigenvalue {spec.eigenvalues[-1]:.6g}; map is not CP"
        )
    ops = []
    for val, vec_col in zip(spec.eigenvalues, spec.eigenvectors.T):
        if val > tol.psd:
            ops.append(frozen_array(math.sqrt(val) * vec_col.reshape(n, n)))
    if not ops:
        raise ValidationError("Choi matrix is numerically zero; no Kraus operators")
    return KrausChannel(dim=n, kraus=tuple(ops))


def map_entropy(phi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Entropy in bits of the bipartite state J(phi)/N; range [0, 2 log2 N]."""
    cls = classify(phi, tol)
    if not cls.stochastic:
        raise NotStochasticError(
            f"map entropy needs a trace-preserving channel; "
            f"residual {cls.stochastic_residual:.3e}"
        )
    return entropy_of_matrix(choi_matrix(phi).matrix / phi.dim)


def partial_trace_output(j: ChoiMatrix) -> np.ndarray:
    """Trace out the output (first) tensor factor; identity iff stochastic."""
    n = j.dim
    return np.einsum("aiaj->ij", j.matrix.reshape(n, n, n, n))


def partial_trace_reference(j: ChoiMatrix) -> np.ndarray:
    """Trace out the reference (second) tensor factor; identity iff unital."""
    n = j.dim
    return np.einsum("aibi->ab", j.matrix.reshape(n, n, n, n))
