"""Seedable random instance generation for states, unitaries, channels and
bistochastic matrices.

All randomness comes from ``numpy.random.Generator`` seeded with PCG64, a
named, platform-stable algorithm: the same (operation, parameters, seed)
triple always produces the same object on any platform.  Bit-compatibility
across different implementations of this toolkit is not promised; tests
regenerate instances instead of comparing stored streams.

Bistochastic channels are generated as mixed-unitary channels, which does not
exhaust all unital channels for N >= 3; tests need valid bi-stochastic
instances, not a uniform measure over them.  Bistochastic matrices are exact
Birkhoff mixtures of permutation matrices rather than Sinkhorn
approximations.
"""

from __future__ import annotations

import numpy as np

from .channels import KrausChannel, kraus_channel
from .classical import ProbabilityVector, StochasticMatrix, probability_vector, stochastic_matrix
from .errors import InvalidRankError, ValidationError
from .states import DensityMatrix, frozen_array, validate_state
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "random_density",
    "random_unitary",
    "random_bistochastic_channel",
    "random_stochastic_channel",
    "random_bistochastic_matrix",
    "random_probability_vector",
]


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    # QR of a complex Ginibre matrix; fixing the phases of R's diagonal makes
    # the factorization unique and the distribution Haar.
    q, r = np.linalg.qr(_complex_normal(rng, (n, n)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(
    n: int, rank: int, seed, tol: ToleranceConfig = DEFAULT_TOL
) -> DensityMatrix:
    """Random state G G^dag / tr(G G^dag) with G an n x rank complex Gaussian."""
    if not 1 <= rank <= n:
        raise InvalidRankError(f"rank must lie in [1, {n}], got {rank}")
    g = _complex_normal(_rng(seed), (n, rank))
    m = g @ g.conj().T
    return validate_state(m / np.trace(m).real, tol)


def random_unitary(n: int, seed) -> np.ndarray:
    """Haar-random unitary via phase-fixed QR of a Ginibre matrix."""
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}")
    return frozen_array(_haar_unitary(_rng(seed), n))


def random_bistochastic_channel(
    n: int, num_unitaries: int, seed, tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Mixed-unitary channel: Kraus family {sqrt(w_i) U_i} with random
    simplex weights and Haar unitaries."""
    if num_unitaries < 1:
        raise ValidationError(f"num_unitaries must be positive, got {num_unitaries}")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(num_unitaries))
    ops = [np.sqrt(w) * _haar_unitary(rng, n) for w in weights]
    return kraus_channel(ops, tol)


def random_stochastic_channel(
    n: int, env_dim: int, seed, tol: ToleranceConfig = DEFAULT_TOL
) -> KrausChannel:
    """Stochastic channel from a random isometry into system (x) environment.

    V is the first n columns of a Haar unitary on the n*env_dim dimensional
    joint space; the Kraus operators are M_e = (I (x) <e|) V, so
    sum M_e^dag M_e = V^dag V = I exactly.
    """
    if env_dim < 1:
        raise ValidationError(f"env_dim must be positive, got {env_dim}")
    big = _haar_unitary(_rng(seed), n * env_dim)
    v = big[:, :n]
    # joint index (i, e) -> i * env_dim + e
    ops = [v[e::env_dim, :] for e in range(env_dim)]
    return kraus_channel(ops, tol)


def random_bistochastic_matrix(
    n: int, num_perms: int, seed, tol: ToleranceConfig = DEFAULT_TOL
) -> StochasticMatrix:
    """Convex combination of random permutation matrices with simplex weights."""
    if num_perms < 1:
        raise ValidationError(f"num_perms must be positive, got {num_perms}")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(num_perms))
    m = np.zeros((n, n))
    for w in weights:
        m[rng.permutation(n), np.arange(n)] += w
    return stochastic_matrix(m, tol)


def random_probability_vector(n: int, seed, tol: ToleranceConfig = DEFAULT_TOL) -> ProbabilityVector:
    """Uniform (flat Dirichlet) random probability vector."""
    return probability_vector(_rng(seed).dirichlet(np.ones(n)), tol)
