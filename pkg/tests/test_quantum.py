import math

import numpy as np
import pytest

from conftest import random_density, random_state, random_unitary
from qcoinflip.quantum import (
    HermitianOperator,
    HilbertLayout,
    StateVector,
    apply_unitary,
    as_rng,
    complex_from_json,
    complex_to_json,
    embed_operator,
    helstrom,
    is_psd,
    measure,
    partial_trace,
    projector,
    qubits,
    tensor,
    trace_distance,
)

QUTRIT = HilbertLayout((3,))
PAIR = HilbertLayout((3, 3))


class TestTensor:
    def test_basis_states(self):
        zero = StateVector.basis(HilbertLayout((2,)), 0)
        out = tensor(zero, zero)
        assert out.layout.factor_dims == (2, 2)
        np.testing.assert_allclose(out.amplitudes, [1, 0, 0, 0])

    def test_norm_multiplicative(self, rng):
        a = random_state(HilbertLayout((3,)), rng)
        b = random_state(HilbertLayout((2, 2)), rng)
        assert abs(tensor(a, b).norm - 1.0) < 1e-12

    def test_identity_tensor_operator_matches_index_arithmetic(self, rng):
        # oracle: build 1_3 (x) M entry by entry from the index split
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        m = (m + m.conj().T) / 2
        op = tensor(HermitianOperator.identity(QUTRIT), HermitianOperator(QUTRIT, m))
        direct = np.zeros((9, 9), dtype=complex)
        for r in range(9):
            for c in range(9):
                r1, r2 = divmod(r, 3)
                c1, c2 = divmod(c, 3)
                direct[r, c] = (r1 == c1) * m[r2, c2]
        np.testing.assert_allclose(op.matrix, direct, atol=1e-14)

    def test_type_mismatch_rejected(self):
        zero = StateVector.basis(HilbertLayout((2,)), 0)
        with pytest.raises(TypeError):
            tensor(zero, HermitianOperator.identity(HilbertLayout((2,))))


class TestPartialTrace:
    def test_commitment_register(self):
        # sqrt(d)|aa> + sqrt(1-d)|22>: second register is diagonal (d, 1-d)
        delta = 0.5
        amps = np.zeros(9, dtype=complex)
        amps[4] = math.sqrt(delta)
        amps[8] = math.sqrt(1 - delta)
        rho = StateVector(PAIR, amps).density_matrix()
        reduced = partial_trace(rho, keep=(1,))
        np.testing.assert_allclose(reduced.matrix, np.diag([0.0, delta, 1 - delta]), atol=1e-14)

    def test_full_trace_scalar(self, rng):
        rho = random_density(HilbertLayout((2, 3)), rng)
        np.testing.assert_allclose(partial_trace(rho, keep=()).matrix, [[1.0]], atol=1e-12)

    def test_product_state_factorizes(self, rng):
        sigma = random_density(HilbertLayout((2,)), rng)
        tau = random_density(HilbertLayout((3,)), rng)
        joint = tensor(sigma, tau)
        np.testing.assert_allclose(partial_trace(joint, keep=(0,)).matrix, sigma.matrix, atol=1e-12)

    def test_trace_and_positivity_preserved_random_sweep(self, rng):
        # spec property sweep: 10^3 random instances, dims <= 12
        layouts = [HilbertLayout(d) for d in ((2, 2), (3, 2), (2, 2, 3), (3, 4), (2, 5))]
        for i in range(1000):
            layout = layouts[i % len(layouts)]
            rho = random_density(layout, rng, rank=1 + i % layout.dim)
            keep = (i % layout.nfactors,)
            reduced = partial_trace(rho, keep=keep)
            assert abs(reduced.trace - 1.0) < 1e-10
            assert np.linalg.eigvalsh(reduced.matrix)[0] > -1e-10

    def test_monotone_under_order(self, rng):
        # A >= B implies tr_W(A) >= tr_W(B): the trace of a PSD gap stays PSD
        from qcoinflip.quantum import ptrace

        for _ in range(50):
            g = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
            gap = g @ g.conj().T  # A - B for some ordered pair
            reduced = ptrace(gap, (2, 3), keep=(1,))
            assert np.linalg.eigvalsh(reduced)[0] > -1e-10

    def test_bad_index(self, rng):
        rho = random_density(HilbertLayout((2, 2)), rng)
        with pytest.raises(ValueError):
            partial_trace(rho, keep=(5,))


class TestTraceDistance:
    def test_self_distance_zero(self, rng):
        rho = random_density(HilbertLayout((4,)), rng)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        lay = HilbertLayout((2,))
        r0 = StateVector.basis(lay, 0).density_matrix()
        r1 = StateVector.basis(lay, 1).density_matrix()
        assert abs(trace_distance(r0, r1) - 2.0) < 1e-12

    def test_commitment_registers_distance(self):
        for v in (4.0, 9.0, 16.0, 25.0):
            delta = 2.0 / math.sqrt(v)
            mats = []
            for a in (0, 1):
                amps = np.zeros(9, dtype=complex)
                amps[4 * a] = math.sqrt(delta)
                amps[8] = math.sqrt(1 - delta)
                mats.append(partial_trace(StateVector(PAIR, amps).density_matrix(), keep=(1,)))
            assert abs(trace_distance(*mats) - 2 * delta) < 1e-12

    def test_triangle_and_unitary_invariance(self, rng):
        lay = HilbertLayout((5,))
        for _ in range(50):
            a, b, c = (random_density(lay, rng) for _ in range(3))
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10
            u = random_unitary(5, rng)
            ua = type(a)(lay, u @ a.matrix @ u.conj().T)
            ub = type(b)(lay, u @ b.matrix @ u.conj().T)
            assert abs(trace_distance(ua, ub) - trace_distance(a, b)) < 1e-10

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            trace_distance(
                random_density(HilbertLayout((2,)), rng), random_density(HilbertLayout((3,)), rng)
            )


class TestHelstrom:
    def test_identical_states(self, rng):
        rho = random_density(HilbertLayout((3,)), rng)
        assert abs(helstrom(rho, rho).success_probability - 0.5) < 1e-12

    def test_orthogonal_pure_states(self):
        lay = HilbertLayout((2,))
        meas = helstrom(
            StateVector.basis(lay, 0).density_matrix(), StateVector.basis(lay, 1).density_matrix()
        )
        assert abs(meas.success_probability - 1.0) < 1e-12

    def test_success_matches_formula_and_is_achieved(self, rng):
        lay = HilbertLayout((4,))
        for _ in range(100):
            r0, r1 = random_density(lay, rng), random_density(lay, rng)
            meas = helstrom(r0, r1)
            formula = 0.5 + trace_distance(r0, r1) / 4.0
            assert abs(meas.success_probability - formula) < 1e-10
            achieved = 0.5 * np.real(
                np.trace(meas.projector_0 @ r0.matrix) + np.trace(meas.projector_1 @ r1.matrix)
            )
            assert abs(achieved - formula) < 1e-10

    def test_commitment_discrimination_vs_povm_search(self, rng):
        # v = 16: formula gives 3/4; no sampled two-outcome POVM beats it
        delta = 0.5
        mats = []
        for a in (0, 1):
            amps = np.zeros(9, dtype=complex)
            amps[4 * a] = math.sqrt(delta)
            amps[8] = math.sqrt(1 - delta)
            mats.append(partial_trace(StateVector(PAIR, amps).density_matrix(), keep=(1,)))
        meas = helstrom(*mats)
        assert abs(meas.success_probability - 0.75) < 1e-12
        best = 0.0
        for _ in range(2000):
            a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            h = a @ a.conj().T
            e = h / (np.linalg.eigvalsh(h)[-1] + rng.uniform(0, 1))  # 0 <= E <= 1
            win = 0.5 * np.real(np.trace(e @ mats[0].matrix) + np.trace((np.eye(3) - e) @ mats[1].matrix))
            best = max(best, win)
        assert best <= 0.75 + 1e-9


class TestApplyUnitary:
    def test_identity(self, rng):
        state = random_state(HilbertLayout((2, 3)), rng)
        out = apply_unitary(state, np.eye(6))
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-14)

    def test_sigma_z_on_plus(self):
        plus = StateVector(HilbertLayout((2,)), np.array([1, 1]) / math.sqrt(2))
        out = apply_unitary(plus, np.diag([1.0, -1.0]))
        np.testing.assert_allclose(out.amplitudes, np.array([1, -1]) / math.sqrt(2), atol=1e-14)

    def test_cnot_fanout_builds_shared_state(self, rng):
        k = 5
        alpha, beta = 0.6, 0.8j
        state = StateVector(qubits(k), np.kron([alpha, beta], [1] + [0] * (2 ** (k - 1) - 1)))
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        for j in range(1, k):
            state = apply_unitary(state, cnot, (0, j))
        expected = np.zeros(2**k, dtype=complex)
        expected[0], expected[-1] = alpha, beta
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_norm_preserved_random_sweep(self, rng):
        layout = HilbertLayout((2, 3, 2))
        for _ in range(200):
            state = random_state(layout, rng)
            u = random_unitary(6, rng)
            assert abs(apply_unitary(state, u, (0, 1)).norm - 1.0) < 1e-12

    def test_non_unitary_rejected(self, rng):
        state = random_state(HilbertLayout((2,)), rng)
        with pytest.raises(ValueError):
            apply_unitary(state, np.array([[1.0, 0.0], [0.0, 2.0]]))


class TestMeasure:
    def test_deterministic_outcome(self):
        state = StateVector.basis(qubits(2), (0, 0))
        outcome, post = measure(state, (1,), as_rng(3))
        assert outcome == (0,)
        np.testing.assert_allclose(post.amplitudes, state.amplitudes)

    def test_shared_pair_correlations(self):
        bell = StateVector(qubits(2), np.array([1, 0, 0, 1]) / math.sqrt(2))
        counts = {0: 0, 1: 0}
        for seed in range(400):
            (bit,), post = measure(bell, (0,), as_rng(seed))
            counts[bit] += 1
            expected = np.zeros(4)
            expected[3 * bit] = 1.0
            np.testing.assert_allclose(np.abs(post.amplitudes), expected, atol=1e-12)
        assert abs(counts[0] - 200) < 4 * 10  # 4 sigma of Binomial(400, 1/2)

    def test_born_frequencies_on_rotated_shared_state(self):
        # Hadamard then measure one leg of the 4-party shared state
        hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        amps = np.zeros(16, dtype=complex)
        amps[0] = amps[-1] = 1 / math.sqrt(2)
        base = StateVector(qubits(4), amps)
        trials = 10_000
        ones = 0
        rng = as_rng(11)
        for _ in range(trials):
            (bit,), _ = measure(apply_unitary(base, hadamard, (2,)), (2,), rng)
            ones += bit
        sigma = math.sqrt(trials * 0.25)
        assert abs(ones - trials / 2) < 4 * sigma

    def test_seeded_reproducibility(self):
        bell = StateVector(qubits(2), np.array([1, 0, 0, 1]) / math.sqrt(2))
        a = measure(bell, (0, 1), as_rng(99))[0]
        b = measure(bell, (0, 1), as_rng(99))[0]
        assert a == b


class TestIsPsd:
    def test_identity(self):
        report = is_psd(HermitianOperator.identity(HilbertLayout((3,))))
        assert report.is_psd and abs(report.lambda_min - 1.0) < 1e-12

    def test_indefinite(self):
        report = is_psd(np.diag([1.0, -1.0]))
        assert not report.is_psd and abs(report.lambda_min + 1.0) < 1e-12

    def test_certificate_block_at_v4(self):
        # L_0 - (v+1)|commit_0><commit_0| with the closed-form multipliers
        from qcoinflip.penalty import PenaltyGame, certificate_scalars, commit_state

        game = PenaltyGame(4.0)
        scal = certificate_scalars(4.0)
        m0 = np.diag([scal.m0, scal.m1, scal.m2])
        block = np.kron(np.eye(3), m0) - 5.0 * projector(commit_state(0, game))
        report = is_psd(block, tol=1e-9)
        assert report.is_psd

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestLayoutAndTypes:
    def test_layout_validation(self):
        with pytest.raises(ValueError):
            HilbertLayout((0, 2))

    def test_state_norm_validation(self):
        with pytest.raises(ValueError):
            StateVector(HilbertLayout((2,)), np.array([1.0, 1.0]))

    def test_subnormalized_density_flag(self):
        lay = HilbertLayout((2,))
        from qcoinflip.quantum import DensityMatrix

        DensityMatrix(lay, 0.5 * np.diag([1.0, 0.0]), subnormalized=True)
        with pytest.raises(ValueError):
            DensityMatrix(lay, 0.5 * np.diag([1.0, 0.0]))

    def test_embed_operator_ordering(self, rng):
        # applying on permuted factors equals conjugation by the swap
        dims = (2, 2)
        u = random_unitary(4, rng)
        swap = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                swap[j * 2 + i, i * 2 + j] = 1.0
        direct = embed_operator(u, dims, (1, 0))
        np.testing.assert_allclose(direct, swap @ u @ swap, atol=1e-12)


class TestJson:
    def test_roundtrip_matrix(self, rng):
        mat = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        np.testing.assert_allclose(complex_from_json(complex_to_json(mat)), mat)

    def test_layout_is_row_major_re_im_pairs(self):
        encoded = complex_to_json(np.array([[1 + 2j, 3 - 1j]]))
        assert encoded == [[[1.0, 2.0], [3.0, -1.0]]]
