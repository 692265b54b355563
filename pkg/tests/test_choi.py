"""Tests for the Choi isomorphism and the map entropy."""

import numpy as np
import pytest

from qentropy import (
    NotPositiveError,
    NotStochasticError,
    channel_distance,
    channel_from_choi,
    channels_equal,
    choi_from_matrix,
    choi_matrix,
    compose,
    kraus_channel,
    map_entropy,
    maximally_entangled_projector,
    partial_trace_output,
    partial_trace_reference,
    random_stochastic_channel,
    random_unitary,
)

from conftest import (
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    unitary_channel,
)


class TestChoiMatrix:
    def test_identity_channel_gives_omega_projector(self):
        j = choi_matrix(identity_channel(2))
        np.testing.assert_allclose(j.matrix, maximally_entangled_projector(2))

    def test_depolarizing_gives_half_identity(self):
        # each block phi(|i><j|) = delta_ij I/2, so J = I/2 (x) I
        j = choi_matrix(depolarizing_channel(2))
        np.testing.assert_allclose(j.matrix, np.eye(4) / 2, atol=1e-12)

    def test_trace_equals_kraus_gram_trace(self, tol):
        phi = random_stochastic_channel(3, 2, seed=0)
        j = choi_matrix(phi)
        gram_trace = sum(np.trace(m.conj().T @ m) for m in phi.kraus)
        assert abs(np.trace(j.matrix) - gram_trace) <= tol.eq
        assert abs(np.trace(j.matrix) - 3.0) <= tol.eq

    @pytest.mark.parametrize("seed", range(5))
    def test_output_partial_trace_identity_iff_stochastic(self, seed, tol):
        phi = random_stochastic_channel(3, 2, seed)
        j = choi_matrix(phi)
        assert np.linalg.norm(partial_trace_output(j) - np.eye(3)) <= tol.eq * 3

    def test_reference_partial_trace_identity_iff_unital(self, tol):
        phi = unitary_channel(random_unitary(3, 1))
        j = choi_matrix(phi)
        assert np.linalg.norm(partial_trace_reference(j) - np.eye(3)) <= tol.eq * 3
        # non-unital witness: amplitude damping leaves the reference trace off I
        from conftest import amplitude_damping_channel

        j2 = choi_matrix(amplitude_damping_channel(0.5))
        assert np.linalg.norm(partial_trace_reference(j2) - np.eye(2)) > 0.1


class TestChannelFromChoi:
    def test_omega_projector_gives_identity_channel(self):
        j = choi_from_matrix(maximally_entangled_projector(2))
        assert channels_equal(channel_from_choi(j), identity_channel(2))

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip_preserves_superoperator(self, seed, tol):
        n = 2 + seed % 4
        phi = random_stochastic_channel(n, 2, seed)
        back = channel_from_choi(choi_matrix(phi))
        assert channel_distance(phi, back) <= tol.recon * n * n * 1e3

    def test_choi_of_extracted_channel_matches(self, tol):
        phi = random_stochastic_channel(3, 3, seed=4)
        j = choi_matrix(phi)
        again = choi_matrix(channel_from_choi(j))
        assert np.linalg.norm(again.matrix - j.matrix) <= tol.recon * 9 * 1e3

    def test_negative_eigenvalue_rejected(self):
        j = choi_from_matrix(np.diag([1.0, 1.0, 1.0, -0.1]))
        with pytest.raises(NotPositiveError):
            channel_from_choi(j)


class TestMapEntropy:
    def test_identity_channel(self):
        assert map_entropy(identity_channel(2)) == pytest.approx(0.0, abs=1e-10)

    def test_unitary_channel(self):
        phi = unitary_channel(random_unitary(3, 5))
        assert map_entropy(phi) == pytest.approx(0.0, abs=1e-8)

    def test_fully_depolarizing_qubit(self):
        # J/N = I_4/4, entropy log2(4) = 2
        assert map_entropy(depolarizing_channel(2)) == pytest.approx(2.0, abs=1e-8)

    def test_dephasing_qubit(self):
        # J/N = (|00><00| + |11><11|)/2, one bit
        assert map_entropy(dephasing_channel(2)) == pytest.approx(1.0, abs=1e-10)

    def test_rejects_non_stochastic(self):
        with pytest.raises(NotStochasticError):
            map_entropy(kraus_channel([0.5 * np.eye(2)]))

    @pytest.mark.parametrize("seed", range(5))
    def test_unitary_composition_invariance(self, seed, tol):
        # special case of composition preservation: unitary outer channel
        psi = random_stochastic_channel(3, 2, seed)
        u = unitary_channel(random_unitary(3, seed + 100))
        assert abs(map_entropy(compose(u, psi)) - map_entropy(psi)) <= tol.eq

    @pytest.mark.parametrize("seed", range(5))
    def test_range(self, seed):
        n = 2 + seed % 3
        phi = random_stochastic_channel(n, 2, seed)
        s = map_entropy(phi)
        assert -1e-10 <= s <= 2 * np.log2(n) + 1e-10
