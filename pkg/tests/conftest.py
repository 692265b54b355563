"""Shared fixtures and channel builders for the test suite."""

import numpy as np
import pytest

from qentropy import DEFAULT_TOL, kraus_channel, validate_state

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def tol():
    return DEFAULT_TOL


def identity_channel(n=2):
    return kraus_channel([np.eye(n)])


def unitary_channel(u):
    return kraus_channel([np.asarray(u, dtype=complex)])


def bit_flip_channel():
    return kraus_channel([SIGMA_X])


def dephasing_channel(n=2):
    """Kraus family {|i><i|}: kills off-diagonal entries."""
    ops = []
    for i in range(n):
        op = np.zeros((n, n), dtype=complex)
        op[i, i] = 1.0
        ops.append(op)
    return kraus_channel(ops)


def weyl_operators(n):
    """The n^2 unitary shift/phase operators X^a Z^b."""
    shift = np.zeros((n, n), dtype=complex)
    for i in range(n):
        shift[(i + 1) % n, i] = 1.0
    phase = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    ops = []
    for a in range(n):
        for b in range(n):
            ops.append(np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(phase, b))
    return ops


def depolarizing_channel(n=2):
    """Fully depolarizing channel X -> tr(X) I / n, via the Weyl twirl."""
    return kraus_channel([w / n for w in weyl_operators(n)])


def amplitude_damping_channel(gamma=0.5):
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return kraus_channel([k0, k1])


def pure_state(n, index=0):
    m = np.zeros((n, n), dtype=complex)
    m[index, index] = 1.0
    return validate_state(m)


def maximally_mixed(n):
    return validate_state(np.eye(n) / n)
