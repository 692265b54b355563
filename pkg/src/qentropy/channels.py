"""Quantum operations as Kraus families.

A channel is a finite list of N x N Kraus operators ``{M_j}`` acting as
``X -> sum_j M_j X M_j^dag``.  The vectorization convention is column
stacking, ``vec(A) = A.T.reshape(-1)``, under which the conjugation map
``X -> M X M^dag`` has matrix ``kron(conj(M), M)`` and the Hilbert-Schmidt
adjoint of a channel corresponds to the conjugate transpose of its
superoperator matrix.

Channel equality is always a statement about superoperator matrices (Kraus
lists are non-unique); use :func:`channel_distance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotSquareError,
    NotStochasticError,
    ValidationError,
)
from .states import (
    DensityMatrix,
    as_complex_matrix,
    frozen_array,
    psd_inverse_sqrt,
    psd_sqrt,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "KrausChannel",
    "ChannelClass",
    "SuperoperatorMatrix",
    "vec",
    "unvec",
    "kraus_channel",
    "classify",
    "apply_channel",
    "adjoint",
    "compose",
    "superoperator_matrix",
    "apply_superoperator",
    "channel_distance",
    "channels_equal",
    "petz_recovery",
]


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m).T.reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v)
    n = math.isqrt(v.size)
    if n * n != v.size:
        raise ValidationError(f"cannot unvec a vector of length {v.size}")
    return v.reshape(n, n).T


@dataclass(frozen=True)
class KrausChannel:
    """A quantum operation given by its Kraus operators."""

    dim: int
    kraus: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class SuperoperatorMatrix:
    """N^2 x N^2 matrix of a channel under column-stacking vectorization."""

    dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class ChannelClass:
    """Classification flags plus the Frobenius residuals they were cut from."""

    trace_nonincreasing: bool
    stochastic: bool
    unital: bool
    bistochastic: bool
    stochastic_residual: float
    unital_residual: float

    def as_dict(self) -> dict:
        return {
            "trace_nonincreasing": self.trace_nonincreasing,
            "stochastic": self.stochastic,
            "unital": self.unital,
            "bistochastic": self.bistochastic,
            "stochastic_residual": self.stochastic_residual,
            "unital_residual": self.unital_residual,
        }


def kraus_channel(
    operators, tol: ToleranceConfig = DEFAULT_TOL, require_trace_nonincreasing: bool = True
) -> KrausChannel:
    """Validate a list of matrices as a Kraus family on a common dimension.

    When ``require_trace_nonincreasing`` the largest eigenvalue of
    ``sum M^dag M`` must not exceed 1 + tol.eq.  Formal families that violate
    this (e.g. adjoints of non-unital channels) can opt out.
    """
    mats = [as_complex_matrix(op) for op in operators]
    if not mats:
        raise ValidationError("a channel needs at least one Kraus operator")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != m.shape[1]:
            raise NotSquareError(f"Kraus operator of shape {m.shape} is not square")
        if m.shape[0] != n:
            raise DimensionMismatchError("Kraus operators act on different dimensions")
    if require_trace_nonincreasing:
        gram = sum(m.conj().T @ m for m in mats)
        top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1])
        if top > 1.0 + tol.eq:
            raise ValidationError(
                f"channel increases trace: max eigenvalue of sum M^dag M is {top:.12g}"
            )
    return KrausChannel(dim=n, kraus=tuple(frozen_array(m) for m in mats))


def classify(phi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL) -> ChannelClass:
    """Flags: trace non-increasing / stochastic (TP) / unital / bi-stochastic."""
    n = phi.dim
    eye = np.eye(n)
    gram = sum(m.conj().T @ m for m in phi.kraus)
    cogram = sum(m @ m.conj().T for m in phi.kraus)
    stoch_res = float(np.linalg.norm(gram - eye))
    unital_res = float(np.linalg.norm(cogram - eye))
    top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1])
    stochastic = stoch_res <= tol.eq * n
    unital = unital_res <= tol.eq * n
    return ChannelClass(
        trace_nonincreasing=top <= 1.0 + tol.eq,
        stochastic=stochastic,
        unital=unital,
        bistochastic=stochastic and unital,
        stochastic_residual=stoch_res,
        unital_residual=unital_res,
    )


def apply_channel(phi: KrausChannel, x: np.ndarray) -> np.ndarray:
    """sum_j M_j X M_j^dag."""
    arr = as_complex_matrix(x)
    if arr.shape != (phi.dim, phi.dim):
        raise DimensionMismatchError(
            f"operator of shape {arr.shape} does not match channel dimension {phi.dim}"
        )
    out = np.zeros_like(arr)
    for m in phi.kraus:
        out += m @ arr @ m.conj().T
    return out


def adjoint(phi: KrausChannel) -> KrausChannel:
    """Hilbert-Schmidt adjoint, with Kraus family {M_j^dag}.

    Not revalidated: the adjoint of a trace non-increasing map need not be
    trace non-increasing (it is unital instead when the map is stochastic).
    """
    return KrausChannel(dim=phi.dim, kraus=tuple(frozen_array(m.conj().T) for m in phi.kraus))


def compose(phi: KrausChannel, psi: KrausChannel) -> KrausChannel:
    """Channel applying psi first, then phi; Kraus family {M_i N_j}."""
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"channel dims differ: {phi.dim} vs {psi.dim}")
    ops = tuple(frozen_array(m @ n) for m in phi.kraus for n in psi.kraus)
    return KrausChannel(dim=phi.dim, kraus=ops)


def superoperator_matrix(phi: KrausChannel) -> SuperoperatorMatrix:
    """sum_j kron(conj(M_j), M_j) under the column-stacking convention."""
    n = phi.dim
    s = np.zeros((n * n, n * n), dtype=complex)
    for m in phi.kraus:
        s += np.kron(m.conj(), m)
    return SuperoperatorMatrix(dim=n, matrix=frozen_array(s))


def apply_superoperator(s: SuperoperatorMatrix, x: np.ndarray) -> np.ndarray:
    return unvec(s.matrix @ vec(as_complex_matrix(x)))


def channel_distance(phi: KrausChannel, psi: KrausChannel) -> float:
    """Frobenius distance between the superoperator matrices of two channels."""
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"channel dims differ: {phi.dim} vs {psi.dim}")
    return float(
        np.linalg.norm(superoperator_matrix(phi).matrix - superoperator_matrix(psi).matrix)
    )


def channels_equal(
    phi: KrausChannel, psi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL
) -> bool:
    return channel_distance(phi, psi) <= tol.eq * phi.dim**2


def petz_recovery(
    phi: KrausChannel, sigma: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Sigma-weighted recovery channel with Kraus family
    ``{sigma^(1/2) M_j^dag phi(sigma)^(-1/2)}``.

    The inverse square root is the generalized one on the support of
    ``phi(sigma)``; applied to ``phi(sigma)`` the result returns ``sigma``
    (restricted to its support) whenever ``phi`` is stochastic.
    """
    cls = classify(phi, tol)
    if not cls.stochastic:
        raise NotStochasticError(
            f"recovery map needs a trace-preserving channel; "
            f"residual {cls.stochastic_residual:.3e}"
        )
    if phi.dim != sigma.dim:
        raise DimensionMismatchError(f"dims differ: channel {phi.dim}, state {sigma.dim}")
    left = psd_sqrt(sigma.matrix, tol)
    right = psd_inverse_sqrt(apply_channel(phi, sigma.matrix), tol)
    ops = [left @ m.conj().T @ right for m in phi.kraus]
    return kraus_channel(ops, tol)
