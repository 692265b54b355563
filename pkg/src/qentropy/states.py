"""Quantum states and their entropic functionals.

A state is a Hermitian, positive semi-definite, trace-one complex matrix.  All
spectral computations in the package go through one primitive, a Hermitian
eigendecomposition (:func:`spectral_decomposition`); matrix functions such as
the square root, the generalized inverse and the logarithm are defined through
it with a single eigenvalue-clipping rule.  All logarithms are base 2, so
every entropy returned anywhere in this package is measured in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveError,
    NotSquareError,
    TraceNotOneError,
    ValidationError,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "Spectrum",
    "DensityMatrix",
    "as_complex_matrix",
    "frozen_array",
    "hermitian_part",
    "spectral_decomposition",
    "validate_state",
    "state_spectrum",
    "von_neumann_entropy",
    "entropy_of_matrix",
    "support_projector",
    "generalized_inverse",
    "relative_entropy",
    "psd_sqrt",
    "psd_inverse_sqrt",
]


def as_complex_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex ndarray, rejecting non-finite entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"expected a matrix, got an array of ndim {arr.ndim}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError("matrix contains non-finite entries")
    return arr


def frozen_array(arr, dtype=complex) -> np.ndarray:
    """Copy an array and mark it read-only (values are immutable by contract)."""
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Column k of ``eigenvectors`` pairs with ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state; construct via :func:`validate_state`."""

    dim: int
    matrix: np.ndarray


def spectral_decomposition(h: np.ndarray) -> Spectrum:
    """Eigendecompose a Hermitian matrix with eigenvalues sorted descending."""
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    return Spectrum(frozen_array(vals[order], dtype=float), frozen_array(vecs[:, order]))


def validate_state(m, tol: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Validate a matrix as a quantum state.

    Eigenvalues in [-tol.psd, 0) are treated as numerical zeros (clipped by
    the spectral accessors); anything below -tol.psd is rejected as genuinely
    non-positive rather than noisy.
    """
    arr = as_complex_matrix(m)
    rows, cols = arr.shape
    if rows != cols:
        raise NotSquareError(f"state matrix must be square, got {rows}x{cols}")
    herm_dev = float(np.max(np.abs(arr - arr.conj().T))) if rows else 0.0
    if herm_dev > tol.herm:
        raise NotHermitianError(f"hermiticity deviation {herm_dev:.3e} exceeds {tol.herm:.1e}")
    trace_dev = abs(complex(np.trace(arr)) - 1.0)
    if trace_dev > tol.trace:
        raise TraceNotOneError(f"|trace - 1| = {trace_dev:.3e} exceeds {tol.trace:.1e}")
    smallest = float(np.linalg.eigvalsh(hermitian_part(arr))[0])
    if smallest < -tol.psd:
        raise NotPositiveError(f"smallest eigenvalue {smallest:.3e} below -{tol.psd:.1e}")
    return DensityMatrix(dim=rows, matrix=frozen_array(arr))


def state_spectrum(rho: DensityMatrix) -> Spectrum:
    """Clipped spectrum of a state: eigenvalues in [0, 1], descending."""
    spec = spectral_decomposition(hermitian_part(rho.matrix))
    vals = np.clip(spec.eigenvalues, 0.0, 1.0)
    return Spectrum(frozen_array(vals, dtype=float), spec.eigenvectors)


def entropy_of_matrix(m: np.ndarray) -> float:
    """Entropy in bits of a PSD unit-trace matrix, without state validation.

    Used internally on matrices that are states by construction (channel
    outputs, normalized Choi matrices); negative eigenvalue noise is clipped.
    """
    vals = np.clip(np.linalg.eigvalsh(hermitian_part(m)), 0.0, 1.0)
    pos = vals[vals > 0.0]
    return float(-(pos * np.log2(pos)).sum() + 0.0)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-tr(rho log2 rho) over the clipped spectrum, with 0*log2(0) := 0."""
    vals = state_spectrum(rho).eigenvalues
    pos = vals[vals > 0.0]
    return float(-(pos * np.log2(pos)).sum() + 0.0)


def support_projector(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue > tol.psd."""
    spec = state_spectrum(rho)
    keep = spec.eigenvalues > tol.psd
    v = spec.eigenvectors[:, keep]
    return v @ v.conj().T


def generalized_inverse(rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse restricted to the support of the state."""
    spec = state_spectrum(rho)
    keep = spec.eigenvalues > tol.psd
    v = spec.eigenvectors[:, keep]
    inv_vals = 1.0 / spec.eigenvalues[keep]
    return (v * inv_vals) @ v.conj().T


def relative_entropy(
    rho: DensityMatrix, sigma: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """tr(rho (log2 rho - log2 sigma)) in bits, or +inf outside sigma's support.

    Support inclusion is tested through projector composition: the result is
    finite only when ||(I - P_sigma) P_rho||_F <= tol.psd.  Borderline supports
    (eigenvalues within tol.psd of zero) are therefore reported as +inf
    conservatively.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"state dims differ: {rho.dim} vs {sigma.dim}")
    p_rho = support_projector(rho, tol)
    p_sigma = support_projector(sigma, tol)
    leak = float(np.linalg.norm((np.eye(rho.dim) - p_sigma) @ p_rho))
    if leak > tol.psd:
        return math.inf
    spec_rho = state_spectrum(rho)
    pos = spec_rho.eigenvalues[spec_rho.eigenvalues > 0.0]
    rho_term = float((pos * np.log2(pos)).sum())
    spec_sigma = state_spectrum(sigma)
    keep = spec_sigma.eigenvalues > tol.psd
    vecs = spec_sigma.eigenvectors[:, keep]
    # <v_k| rho |v_k> for the support eigenvectors of sigma
    weights = np.real(np.sum(vecs.conj() * (rho.matrix @ vecs), axis=0))
    sigma_term = float((weights * np.log2(spec_sigma.eigenvalues[keep])).sum())
    return rho_term - sigma_term


def psd_sqrt(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix through its spectrum."""
    spec = spectral_decomposition(hermitian_part(as_complex_matrix(m)))
    if spec.eigenvalues[-1] < -tol.psd:
        raise NotPositiveError(
            f"matrix is not PSD: smallest eigenvalue {spec.eigenvalues[-1]:.3e}"
        )
    vals = np.sqrt(np.clip(spec.eigenvalues, 0.0, None))
    return (spec.eigenvectors * vals) @ spec.eigenvectors.conj().T


def psd_inverse_sqrt(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Generalized inverse square root of a PSD matrix on its support."""
    spec = spectral_decomposition(hermitian_part(as_complex_matrix(m)))
    if spec.eigenvalues[-1] < -tol.psd:
        raise NotPositiveError(
            f"matrix is not PSD: smallest eigenvalue {spec.eigenvalues[-1]:.3e}"
        )
    vals = np.where(spec.eigenvalues > tol.psd, spec.eigenvalues, np.inf)
    return (spec.eigenvectors * (1.0 / np.sqrt(vals))) @ spec.eigenvectors.conj().T
