import numpy as np
import pytest
import scipy.linalg

from conftest import dense_unitary, random_system
from qocsim import circuit as qc
from qocsim.encoding import (
    CircuitVariant,
    decode_populations,
    diagonal_layer,
    evolution_circuit,
    gamma_pair,
    pauli_coefficients,
    prepare_ground,
    trotter_step,
)
from qocsim.model import ControlProblem, PropagationGrid, PulseParameters
from qocsim.reference import propagate_exact


def subspace_projection(circuit) -> np.ndarray:
    """QxQ action of a circuit on the one-hot basis |e_k> = |1 << k>."""
    n = circuit.n_qubits
    u = dense_unitary(circuit)
    idx = [1 << k for k in range(n)]
    return u[np.ix_(idx, idx)]


def exact_step_matrix(system, field, dt) -> np.ndarray:
    coeffs = pauli_coefficients(system, field)
    return scipy.linalg.expm(-1j * coeffs.to_matrix() * dt)


class TestPauliCoefficients:
    def test_worked_two_level(self):
        from qocsim.model import MolecularSystem

        dip = np.zeros((3, 2, 2))
        dip[0] = [[0.1, 1.0], [1.0, -0.1]]
        system = MolecularSystem(energies=np.array([0.0, 0.125]), dipole=dip)
        coeffs = pauli_coefficients(system, np.array([0.01, 0.0, 0.0]))
        assert coeffs.theta == pytest.approx([-0.001, 0.125 + 0.001], abs=1e-15)
        assert coeffs.alpha[0, 1] == pytest.approx(0.01)

    def test_matrix_matches_hamiltonian(self, cyan3):
        from qocsim.model import hamiltonian_at

        rng = np.random.default_rng(0)
        field = rng.normal(size=3) * 0.01
        coeffs = pauli_coefficients(cyan3, field)
        assert np.allclose(coeffs.to_matrix(), hamiltonian_at(cyan3, field), atol=1e-14)

    def test_coupled_pairs_cutoff(self, cyan3):
        zero = pauli_coefficients(cyan3, np.zeros(3))
        assert zero.coupled_pairs() == []
        coeffs = pauli_coefficients(cyan3, np.array([0.01, 0.0, 0.0]))
        pairs = coeffs.coupled_pairs()
        assert pairs == sorted(pairs)
        for q, p in pairs:
            assert q < p
            assert abs(coeffs.alpha[q, p]) > 1e-14


class TestPrepareGround:
    def test_encodes_state_one(self):
        out = qc.apply_statevector(prepare_ground(3), qc.StateVector.zero(3))
        assert out.amplitudes[0b001] == 1.0


class TestDiagonalLayer:
    def test_zero_angles_identity(self):
        circ = diagonal_layer(np.zeros(3), 1.0)
        assert np.allclose(dense_unitary(circ), np.eye(8))

    def test_z_like_at_pi(self):
        # theta_k * dt = pi flips the sign of the occupied branch of qubit k
        circ = diagonal_layer(np.array([np.pi]), 1.0)
        assert np.allclose(dense_unitary(circ), np.diag([1.0, -1.0]), atol=1e-15)

    def test_accumulated_phases_match_free_evolution(self, cyan3):
        dt, steps = 1.0, 25
        layer = diagonal_layer(cyan3.energies, dt)
        state = qc.apply_statevector(prepare_ground(3), qc.StateVector.zero(3))
        for _ in range(steps):
            state = qc.apply_statevector(layer, state)
        amp = state.amplitudes[0b001]
        assert abs(amp - np.exp(-1j * cyan3.energies[0] * dt * steps)) < 1e-8

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            diagonal_layer(np.zeros(2), 0.0)


class TestGammaPair:
    def test_zero_coupling_identity(self):
        for variant in CircuitVariant:
            circ = gamma_pair(0, 2, 0.0, 1.0, variant, 3)
            assert np.allclose(dense_unitary(circ), np.eye(8), atol=1e-12)

    def test_matches_dense_exponential(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        y = np.array([[0, -1j], [1j, 0]], dtype=complex)
        alpha, dt = 0.37, 0.5
        xx = np.kron(x, x)
        yy = np.kron(y, y)
        expected = scipy.linalg.expm(-0.5j * alpha * dt * (xx + yy))
        circ = gamma_pair(0, 1, alpha, dt, CircuitVariant.SINGLE_OCC, 2)
        assert np.max(np.abs(dense_unitary(circ) - expected)) < 1e-10

    def test_invariant_states(self):
        circ = gamma_pair(0, 1, 0.4, 1.0, CircuitVariant.SINGLE_OCC, 2)
        u = dense_unitary(circ)
        # |00> and |11> are untouched up to phase cancellation of XX and YY
        assert abs(u[0, 0] - 1.0) < 1e-12
        assert abs(u[3, 3] - 1.0) < 1e-12

    def test_variants_agree_on_subspace(self):
        alpha, dt = 0.21, 0.8
        mats = []
        for variant in (CircuitVariant.JW_FULL, CircuitVariant.SINGLE_OCC):
            circ = gamma_pair(0, 3, alpha, dt, variant, 4)
            mats.append(subspace_projection(circ))
        assert np.max(np.abs(mats[0] - mats[1])) < 1e-10

    def test_order_validation(self):
        with pytest.raises(ValueError):
            gamma_pair(2, 1, 0.1, 1.0, CircuitVariant.SINGLE_OCC, 3)


class TestTrotterStep:
    def test_zero_field_is_pure_phase_layer(self, cyan3):
        circ = trotter_step(cyan3, np.zeros(3), 1.0)
        assert all(g.kind == "PHASE" for g in circ.gates)
        assert len(circ.gates) == 3

    def test_single_step_near_exact(self, cyan3):
        field = np.array([0.01, 0.0, 0.0])
        dt = 1.0
        exact = exact_step_matrix(cyan3, field, dt)
        for variant in CircuitVariant:
            proj = subspace_projection(trotter_step(cyan3, field, dt, variant))
            assert np.max(np.abs(proj - exact)) < 2e-3

    def test_error_first_order_in_dt(self, cyan3):
        field = np.array([0.02, 0.0, 0.0])
        errs = []
        for dt in (1.0, 0.5):
            proj = subspace_projection(trotter_step(cyan3, field, dt))
            errs.append(np.max(np.abs(proj - exact_step_matrix(cyan3, field, dt))) / dt)
        # per-step error is O(dt^2), so error/dt halves with dt
        assert 1.6 <= errs[0] / errs[1] <= 2.6

    def test_product_formula_structure(self, cyan3):
        # the projected step equals exp(-i Hz dt) times the ascending-pair
        # product of exact pair exponentials
        field = np.array([0.015, -0.01, 0.02])
        dt = 0.7
        coeffs = pauli_coefficients(cyan3, field)
        expected = np.diag(np.exp(-1j * coeffs.theta * dt))
        for q, p in coeffs.coupled_pairs():
            h_pair = np.zeros((3, 3), dtype=complex)
            h_pair[q, p] = h_pair[p, q] = -coeffs.alpha[q, p]
            expected = scipy.linalg.expm(-1j * h_pair * dt) @ expected
        proj = subspace_projection(trotter_step(cyan3, field, dt))
        assert np.max(np.abs(proj - expected)) < 1e-10

    def test_variant_subspace_equivalence_random(self):
        rng = np.random.default_rng(17)
        for q_dim in (3, 4, 5):
            system = random_system(q_dim, rng, coupling_scale=0.5)
            field = rng.normal(size=3) * 0.05
            ref = subspace_projection(
                trotter_step(system, field, 0.5, CircuitVariant.JW_FULL)
            )
            single = subspace_projection(
                trotter_step(system, field, 0.5, CircuitVariant.SINGLE_OCC)
            )
            assert np.max(np.abs(ref - single)) < 1e-10

    def test_reordered_deviation_second_order(self):
        # sharing basis-change layers reorders non-commuting cores; the
        # resulting deviation from the per-pair layout shrinks as O(dt^2)
        rng = np.random.default_rng(23)
        system = random_system(4, rng, coupling_scale=0.5)
        field = np.array([0.2, 0.1, -0.15])
        devs = []
        for dt in (0.4, 0.2):
            a = subspace_projection(trotter_step(system, field, dt, CircuitVariant.SINGLE_OCC))
            b = subspace_projection(
                trotter_step(system, field, dt, CircuitVariant.SINGLE_OCC_REORDERED)
            )
            devs.append(np.max(np.abs(a - b)))
        assert 3.0 <= devs[0] / devs[1] <= 5.0


class TestEvolutionCircuit:
    def make_problem(self, system, duration=10.0, dt=1.0):
        m = 4
        amps = np.zeros((3, m + 1))
        amps[0, 1] = 0.005
        template = PulseParameters(duration, m, amps)
        return ControlProblem(
            system=system,
            target_state_index=1,
            pulse_template=template,
            grid=PropagationGrid.for_duration(duration, dt),
        )

    def test_preparation_comes_first(self, cyan3):
        problem = self.make_problem(cyan3)
        circ = evolution_circuit(problem, problem.pulse_template,
                                 PropagationGrid(dt=10.0, n_steps=1))
        bounds = circ.metadata["step_boundaries"]
        assert bounds[0] == 1  # ground-state preparation is the single leading gate
        assert circ.gates[0] == qc.x(0)
        assert circ.prefix(bounds[0]).gates == [qc.x(0)]

    def test_step_boundaries(self, cyan3):
        problem = self.make_problem(cyan3)
        circ = evolution_circuit(problem, problem.pulse_template)
        bounds = circ.metadata["step_boundaries"]
        assert len(bounds) == problem.grid.n_steps + 1
        assert bounds[0] == 1
        assert bounds[-1] == len(circ)
        assert all(b > a for a, b in zip(bounds, bounds[1:]))

    def test_matches_exact_propagation(self, cyan3):
        problem = self.make_problem(cyan3, duration=50.0, dt=0.5)
        pulse = problem.pulse_template
        circ = evolution_circuit(problem, pulse)
        out = qc.apply_statevector(circ, qc.StateVector.zero(3))
        pops, leak = decode_populations(out, 3)
        exact = propagate_exact(problem, pulse)
        assert np.max(np.abs(pops - exact.populations[-1])) < 1e-2
        assert leak < 1e-9

    def test_grid_duration_mismatch(self, cyan3):
        problem = self.make_problem(cyan3)
        with pytest.raises(ValueError):
            evolution_circuit(problem, problem.pulse_template,
                              PropagationGrid.for_duration(20.0, 1.0))

    def test_leakage_stays_tiny(self):
        rng = np.random.default_rng(31)
        system = random_system(4, rng, coupling_scale=0.3)
        m = 4
        amps = rng.normal(size=(3, m + 1)) * 0.01
        template = PulseParameters(20.0, m, amps, include_dc=True)
        problem = ControlProblem(system, 1, template,
                                 PropagationGrid.for_duration(20.0, 1.0))
        for variant in (CircuitVariant.JW_FULL, CircuitVariant.SINGLE_OCC):
            circ = evolution_circuit(problem, template, variant=variant)
            out = qc.apply_statevector(circ, qc.StateVector.zero(4))
            _, leak = decode_populations(out, 4)
            assert leak < 1e-9


class TestDecodePopulations:
    def test_ground_state(self):
        psi = qc.StateVector.basis(3, 0b001)
        pops, leak = decode_populations(psi, 3)
        assert np.allclose(pops, [1.0, 0.0, 0.0])
        assert leak == 0.0

    def test_maximally_mixed(self):
        rho = qc.DensityMatrix.maximally_mixed(3)
        pops, leak = decode_populations(rho, 3)
        assert np.allclose(pops, 1.0 / 8.0)
        assert leak == pytest.approx(5.0 / 8.0)

    def test_histogram(self):
        counts = {"001": 50, "010": 30, "100": 10, "000": 10}
        pops, leak = decode_populations(counts, 3)
        assert np.allclose(pops, [0.5, 0.3, 0.1])
        assert leak == pytest.approx(0.1)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            decode_populations(qc.StateVector.zero(2), 3)
