"""Tests for the entropy-preservation equivalences, the fixed-point algebra
machinery, structure verification and pair synthesis."""

from collections import Counter

import numpy as np
import pytest

from qentropy import (
    BlockSpec,
    FixedPointBasis,
    InvalidSpecError,
    NotAnAlgebraError,
    NotBistochasticError,
    NotStochasticError,
    StructureMismatchError,
    SupportViolationError,
    block_form_residual,
    check_petz_equality,
    decompose_fixed_point_algebra,
    entropy_monotonicity_check,
    entropy_preservation_report,
    fixed_point_space,
    map_entropy_preservation_report,
    parse_block_spec,
    phase_invariant_unitary_distance,
    random_bistochastic_channel,
    random_density,
    random_stochastic_channel,
    random_unitary,
    synthesize_pair,
    validate_state,
    verify_block_structure,
)

from conftest import (
    amplitude_damping_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    maximally_mixed,
    pure_state,
    unitary_channel,
)


class TestPreservationReport:
    def test_unitary_preserves_everything(self, tol):
        phi = unitary_channel(random_unitary(3, 0))
        rho = random_density(3, 2, seed=1)
        report = entropy_preservation_report(phi, rho)
        assert report.entropy_preserved and report.fixed_point and report.agreement
        assert report.fixed_point_residual <= tol.fix

    def test_depolarizing_on_pure_state(self):
        report = entropy_preservation_report(depolarizing_channel(2), pure_state(2))
        assert report.entropy_in == pytest.approx(0.0, abs=1e-12)
        assert report.entropy_out == pytest.approx(1.0, abs=1e-12)
        assert not report.entropy_preserved and not report.fixed_point
        assert report.agreement
        # residual oracle: ||I/2 - |0><0|||_F = sqrt(1/2)
        assert report.fixed_point_residual == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_synthesized_pair_preserves(self):
        phi, rho, _ = synthesize_pair(BlockSpec(blocks=((2, 1), (1, 2))), seed=3)
        report = entropy_preservation_report(phi, rho)
        assert report.entropy_preserved and report.fixed_point and report.agreement

    def test_rejects_non_bistochastic(self):
        with pytest.raises(NotBistochasticError):
            entropy_preservation_report(amplitude_damping_channel(0.5), maximally_mixed(2))

    @pytest.mark.parametrize("seed", range(20))
    def test_verdicts_agree_on_random_pairs(self, seed):
        n = 2 + seed % 5
        phi = random_bistochastic_channel(n, 2 + seed % 2, seed)
        rho = random_density(n, 1 + seed % n, seed + 100)
        report = entropy_preservation_report(phi, rho)
        assert report.agreement


class TestMonotonicity:
    def test_unitary_gives_zero_slack(self, tol):
        phi = unitary_channel(random_unitary(3, 4))
        rho = random_density(3, 3, seed=5)
        sigma = random_density(3, 3, seed=6)
        report = entropy_monotonicity_check(phi, rho, sigma)
        assert abs(report.slack) <= tol.eq

    def test_equal_states_give_zero_both_sides(self, tol):
        phi = random_stochastic_channel(3, 2, seed=7)
        rho = random_density(3, 3, seed=8)
        report = entropy_monotonicity_check(phi, rho, rho)
        assert report.relative_entropy_in == pytest.approx(0.0, abs=tol.eq)
        assert report.relative_entropy_out == pytest.approx(0.0, abs=tol.eq)

    @pytest.mark.parametrize("seed", range(20))
    def test_slack_never_negative(self, seed, tol):
        n = 2 + seed % 4
        phi = random_stochastic_channel(n, 2, seed)
        rho = random_density(n, 1 + seed % n, seed + 200)
        sigma = random_density(n, n, seed + 300)
        report = entropy_monotonicity_check(phi, rho, sigma)
        assert report.slack >= -tol.eq

    @pytest.mark.parametrize("seed", range(10))
    def test_bistochastic_entropy_gain(self, seed, tol):
        n = 2 + seed % 4
        phi = random_bistochastic_channel(n, 3, seed)
        rho = random_density(n, n, seed + 400)
        report = entropy_monotonicity_check(phi, rho, maximally_mixed(n))
        assert report.entropy_gain is not None
        assert report.entropy_gain >= -tol.eq

    def test_support_violation(self):
        phi = identity_channel(2)
        with pytest.raises(SupportViolationError):
            entropy_monotonicity_check(phi, maximally_mixed(2), pure_state(2))

    def test_rejects_non_stochastic(self):
        from qentropy import kraus_channel

        with pytest.raises(NotStochasticError):
            entropy_monotonicity_check(
                kraus_channel([0.5 * np.eye(2)]), maximally_mixed(2), maximally_mixed(2)
            )


class TestPetzEquality:
    def test_unitary_both_verdicts_true(self):
        phi = unitary_channel(random_unitary(3, 9))
        rho = random_density(3, 2, seed=10)
        sigma = random_density(3, 3, seed=11)
        report = check_petz_equality(phi, rho, sigma)
        assert report.equality and report.recovery and report.agreement

    def test_equal_states_both_verdicts_true(self):
        phi = random_stochastic_channel(3, 2, seed=12)
        sigma = random_density(3, 3, seed=13)
        report = check_petz_equality(phi, sigma, sigma)
        assert report.equality and report.recovery and report.agreement

    def test_depolarizing_strict_decrease(self):
        phi = depolarizing_channel(2)
        rho = pure_state(2)
        sigma = validate_state(np.diag([0.75, 0.25]))
        report = check_petz_equality(phi, rho, sigma)
        assert not report.equality and not report.recovery
        assert report.agreement
        assert report.equality_gap > 0.1

    @pytest.mark.parametrize("seed", range(20))
    def test_verdict_agreement(self, seed):
        n = 2 + seed % 4
        phi = random_stochastic_channel(n, 2, seed)
        rho = random_density(n, n, seed + 500)
        sigma = random_density(n, n, seed + 600)
        assert check_petz_equality(phi, rho, sigma).agreement


class TestFixedPointSpace:
    def test_unitary_fixes_all_operators(self):
        phi = unitary_channel(random_unitary(3, 14))
        basis = fixed_point_space(phi)
        assert len(basis.basis) == 9

    def test_depolarizing_fixes_only_identity(self):
        basis = fixed_point_space(depolarizing_channel(2))
        assert len(basis.basis) == 1
        scaled = basis.basis[0] / basis.basis[0][0, 0]
        np.testing.assert_allclose(scaled, np.eye(2), atol=1e-10)

    def test_dephasing_fixes_diagonals(self):
        basis = fixed_point_space(dephasing_channel(3))
        assert len(basis.basis) == 3
        for b in basis.basis:
            np.testing.assert_allclose(b, np.diag(np.diagonal(b)), atol=1e-10)

    def test_residuals_and_gap(self, tol):
        basis = fixed_point_space(random_bistochastic_channel(3, 3, seed=15))
        assert max(basis.eigenvalue_residuals) <= tol.fix
        assert basis.spectral_gap > tol.fix

    def test_hermitian_representatives(self):
        basis = fixed_point_space(random_bistochastic_channel(4, 3, seed=16))
        for b in basis.basis:
            assert np.linalg.norm(b - b.conj().T) <= 1e-10

    def test_orthonormal(self, tol):
        basis = fixed_point_space(dephasing_channel(4))
        gram = np.array(
            [[np.trace(a.conj().T @ b) for b in basis.basis] for a in basis.basis]
        )
        np.testing.assert_allclose(gram, np.eye(len(basis.basis)), atol=tol.recon * 1e3)

    def test_rejects_non_bistochastic(self):
        with pytest.raises(NotBistochasticError):
            fixed_point_space(amplitude_damping_channel(0.3))


class TestDecompose:
    def test_full_algebra_single_block(self):
        basis = fixed_point_space(unitary_channel(random_unitary(3, 17)))
        structure = decompose_fixed_point_algebra(basis)
        assert structure.block_dims == ((3, 1),)

    def test_identity_span_single_block(self):
        basis = fixed_point_space(depolarizing_channel(3))
        structure = decompose_fixed_point_algebra(basis)
        assert structure.block_dims == ((1, 3),)

    def test_diagonal_algebra(self):
        basis = fixed_point_space(dephasing_channel(3))
        structure = decompose_fixed_point_algebra(basis)
        assert structure.block_dims == ((1, 1), (1, 1), (1, 1))

    def test_not_an_algebra_rejected(self):
        # span{|0><1|} is not dagger-closed and has no identity
        element = np.zeros((2, 2), dtype=complex)
        element[0, 1] = 1.0
        fake = FixedPointBasis(
            dim=2, basis=(element,), eigenvalue_residuals=(0.0,), spectral_gap=1.0
        )
        with pytest.raises(NotAnAlgebraError):
            decompose_fixed_point_algebra(fake)

    def test_non_unital_span_rejected(self):
        # dagger-closed but misses the identity
        element = np.diag([1.0, 0.0]).astype(complex)
        offs = np.zeros((2, 2), dtype=complex)
        offs[0, 1] = offs[1, 0] = 1.0
        fake = FixedPointBasis(
            dim=2,
            basis=(element, offs / np.sqrt(2)),
            eigenvalue_residuals=(0.0, 0.0),
            spectral_gap=1.0,
        )
        with pytest.raises(NotAnAlgebraError):
            decompose_fixed_point_algebra(fake)

    def test_form_residual_small(self, tol):
        basis = fixed_point_space(random_bistochastic_channel(4, 2, seed=18))
        structure = decompose_fixed_point_algebra(basis)
        assert block_form_residual(basis, structure) <= 10 * tol.fix

    def test_deterministic_given_seed(self):
        basis = fixed_point_space(dephasing_channel(3))
        a = decompose_fixed_point_algebra(basis, seed=5)
        b = decompose_fixed_point_algebra(basis, seed=5)
        for ba, bb in zip(a.blocks, b.blocks):
            np.testing.assert_array_equal(ba.isometry, bb.isometry)

    @pytest.mark.parametrize(
        "blocks", [((2, 2),), ((2, 1), (1, 2)), ((1, 1), (1, 1)), ((3, 1), (1, 3))]
    )
    def test_round_trip_block_dims(self, blocks):
        phi, _, _ = synthesize_pair(BlockSpec(blocks=blocks), seed=19)
        structure = decompose_fixed_point_algebra(fixed_point_space(phi))
        assert Counter(structure.block_dims) == Counter(blocks)


class TestVerifyBlockStructure:
    def test_identity_channel_single_block(self):
        phi = identity_channel(3)
        rho = maximally_mixed(3)
        basis = fixed_point_space(phi)
        structure = decompose_fixed_point_algebra(basis)
        result = verify_block_structure(structure, phi, rho)
        assert result.block_dims == ((3, 1),)
        u = result.left_unitaries[0]
        assert np.linalg.norm(u.conj().T @ u - np.eye(3)) <= 1e-8
        # recovered unitary is the identity up to a phase
        assert phase_invariant_unitary_distance(np.eye(3), u) <= 1e-6

    def test_synthesized_round_trip(self, tol):
        spec = BlockSpec(blocks=((2, 1), (1, 2)), weights=(0.7, 0.3))
        phi, rho, structure = synthesize_pair(spec, seed=20)
        result = verify_block_structure(structure, phi, rho)
        assert result.block_dims in (((1, 2), (2, 1)), ((2, 1), (1, 2)))
        np.testing.assert_allclose(sorted(result.weights), [0.3, 0.7], atol=tol.eq)
        assert result.action_residual <= tol.eq * 4

    def test_recovers_specified_unitary(self):
        u = np.asarray(random_unitary(2, 21))
        spec = BlockSpec(
            blocks=((2, 1),),
            weights=(1.0,),
            left_unitaries=(u,),
            left_states=(np.diag([0.6, 0.4]).astype(complex),),
        )
        phi, rho, structure = synthesize_pair(spec, seed=22)
        result = verify_block_structure(structure, phi, rho)
        assert phase_invariant_unitary_distance(u, result.left_unitaries[0]) <= 1e-6

    def test_depolarizing_claimed_unitary_block_mismatch(self):
        phi = depolarizing_channel(2)
        rho = maximally_mixed(2)
        full_block = decompose_fixed_point_algebra(
            fixed_point_space(unitary_channel(np.eye(2)))
        )  # claims a single (2, 1) block
        with pytest.raises(StructureMismatchError):
            verify_block_structure(full_block, phi, rho)

    def test_state_coupling_blocks_mismatch(self):
        phi = dephasing_channel(2)
        structure = decompose_fixed_point_algebra(fixed_point_space(phi))
        rho = validate_state(np.array([[0.5, 0.4], [0.4, 0.5]]))
        with pytest.raises(StructureMismatchError):
            verify_block_structure(structure, phi, rho)


class TestSynthesizePair:
    def test_single_left_block_is_unitary_channel(self):
        phi, rho, structure = synthesize_pair(BlockSpec(blocks=((4, 1),)), seed=23)
        assert len(phi.kraus) == 1
        assert structure.block_dims == ((4, 1),)
        report = entropy_preservation_report(phi, rho)
        assert report.entropy_preserved

    def test_single_right_block_gives_maximally_mixed(self, tol):
        phi, rho, _ = synthesize_pair(BlockSpec(blocks=((1, 4),)), seed=24)
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=tol.eq)

    def test_spec_example_preserves(self, tol):
        phi, rho, _ = synthesize_pair(BlockSpec(blocks=((2, 1), (1, 2))), seed=7)
        report = entropy_preservation_report(phi, rho)
        assert abs(report.entropy_out - report.entropy_in) <= tol.eq

    def test_deterministic(self):
        a_phi, a_rho, _ = synthesize_pair(BlockSpec(blocks=((2, 2),)), seed=25)
        b_phi, b_rho, _ = synthesize_pair(BlockSpec(blocks=((2, 2),)), seed=25)
        np.testing.assert_array_equal(a_rho.matrix, b_rho.matrix)
        for ma, mb in zip(a_phi.kraus, b_phi.kraus):
            np.testing.assert_array_equal(ma, mb)

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpecError):
            synthesize_pair(BlockSpec(blocks=()), seed=0)
        with pytest.raises(InvalidSpecError):
            synthesize_pair(BlockSpec(blocks=((0, 2),)), seed=0)
        with pytest.raises(InvalidSpecError):
            synthesize_pair(BlockSpec(blocks=((2, 1),), weights=(0.4, 0.6)), seed=0)

    def test_parse_block_spec(self):
        assert parse_block_spec("2x1,1x2").blocks == ((2, 1), (1, 2))
        with pytest.raises(InvalidSpecError):
            parse_block_spec("2x")


class TestMapEntropyReport:
    def test_unitary_outer_channel(self):
        phi = unitary_channel(random_unitary(3, 26))
        psi = random_stochastic_channel(3, 2, seed=27)
        report = map_entropy_preservation_report(phi, psi)
        assert report.entropy_preserved and report.composition_fixed and report.agreement

    def test_depolarizing_on_identity(self):
        report = map_entropy_preservation_report(depolarizing_channel(2), identity_channel(2))
        assert report.map_entropy_in == pytest.approx(0.0, abs=1e-10)
        assert report.map_entropy_composed == pytest.approx(2.0, abs=1e-8)
        assert not report.entropy_preserved and not report.composition_fixed
        assert report.agreement

    def test_dephasing_composed_with_itself(self, tol):
        # dephasing is an idempotent Hermitian projection, verified numerically
        phi = dephasing_channel(2)
        from qentropy import channel_distance, compose

        assert channel_distance(compose(phi, phi), phi) <= tol.eq
        report = map_entropy_preservation_report(phi, phi)
        assert report.entropy_preserved and report.composition_fixed and report.agreement

    def test_rejects_wrong_preconditions(self):
        with pytest.raises(NotBistochasticError):
            map_entropy_preservation_report(amplitude_damping_channel(0.4), identity_channel(2))
        from qentropy import kraus_channel

        with pytest.raises(NotStochasticError):
            map_entropy_preservation_report(identity_channel(2), kraus_channel([0.5 * np.eye(2)]))

    @pytest.mark.parametrize("seed", range(10))
    def test_agreement_on_random_pairs(self, seed):
        n = 2 + seed % 3
        phi = random_bistochastic_channel(n, 2 + seed % 2, seed)
        psi = random_stochastic_channel(n, 2, seed + 800)
        assert map_entropy_preservation_report(phi, psi).agreement
