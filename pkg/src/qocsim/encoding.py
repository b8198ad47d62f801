"""CI-state <-> qubit encoding and synthesis of the evolution circuits.

Electronic state k is encoded as the bitstring with only qubit k set, so a
Q-level system uses Q qubits and the dynamics stays inside the
single-excitation subspace.  A propagation step is a diagonal phase layer
followed by a product of two-qubit Pauli-string exponentials, one X-string
and one Y-string per coupled state pair, in three interchangeable layouts:

* ``JW_FULL``          - keeps the Jordan-Wigner Z-string between the pair's
                         qubits (CNOT cascade); sign convention chosen so the
                         subspace action matches the other variants exactly.
* ``SINGLE_OCC``       - drops the Z-string (2 CNOTs per string exponential).
* ``SINGLE_OCC_REORDERED`` - emits all X-string cores, then all Y-string
                         cores, sharing one basis-change layer per block.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from . import circuit as qc
from .model import ControlProblem, MolecularSystem, PropagationGrid, PulseParameters, field_samples

COUPLING_CUTOFF = 1e-14


class CircuitVariant(enum.Enum):
    JW_FULL = "jw-full"
    SINGLE_OCC = "single-occ"
    SINGLE_OCC_REORDERED = "single-occ-reordered"

    @classmethod
    def from_name(cls, name: str) -> "CircuitVariant":
        for variant in cls:
            if variant.value == name:
                return variant
        raise ValueError(f"unknown circuit variant {name!r}")


@dataclass(frozen=True)
class PauliCoefficients:
    """Diagonal phases theta_kk and pair couplings alpha_qp of the mapped Hamiltonian."""

    theta: np.ndarray   # (Q,)
    alpha: np.ndarray   # (Q, Q) symmetric, diagonal unused

    def coupled_pairs(self) -> List[Tuple[int, int]]:
        """Pairs (q, p), q < p, with coupling above the sparsity cutoff, ascending."""
        q_dim = len(self.theta)
        return [
            (q, p)
            for q in range(q_dim)
            for p in range(q + 1, q_dim)
            if abs(self.alpha[q, p]) > COUPLING_CUTOFF
        ]

    def to_matrix(self) -> np.ndarray:
        """Reconstruct the Q x Q Hamiltonian: diag theta_kk, off-diagonal -alpha_qp."""
        h = -np.array(self.alpha, dtype=float)
        h[np.diag_indices_from(h)] = self.theta
        return h


def pauli_coefficients(system: MolecularSystem, field) -> PauliCoefficients:
    """theta_kk = e_k - E.mu_kk and alpha_qp = E.mu_qp for an instantaneous field."""
    field = np.asarray(field, dtype=float)
    coupling = np.tensordot(field, system.dipole, axes=([0], [0]))
    theta = system.energies - np.diag(coupling)
    return PauliCoefficients(theta=theta, alpha=coupling)


def prepare_ground(n_qubits: int) -> qc.Circuit:
    """Encode the ground state: a single X on qubit 0 yields |0...01>."""
    return qc.Circuit(n_qubits, [qc.x(0)])


def diagonal_layer(theta: np.ndarray, dt: float) -> qc.Circuit:
    """Phase layer implementing the diagonal part of one propagation step.

    Qubit k picks up diag(1, e^{-i theta_k dt}), so the encoded state |k>
    acquires exactly the phase e^{-i theta_k dt} of the exact diagonal
    evolution (global phase dropped).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = len(theta)
    circ = qc.Circuit(n)
    for k in range(n):
        circ.append(qc.phase(k, -float(theta[k]) * dt))
    return circ


def _basis_in(axis: str, q: int) -> List[qc.Gate]:
    # Rotate the qubit so a Z-basis rotation acts as an X (H) or Y (S^dag, H) one.
    if axis == "x":
        return [qc.h(q)]
    return [qc.sdg(q), qc.h(q)]


def _basis_out(axis: str, q: int) -> List[qc.Gate]:
    if axis == "x":
        return [qc.h(q)]
    return [qc.h(q), qc.s(q)]


def _string_core(q: int, p: int, angle: float, through: bool) -> List[qc.Gate]:
    """CNOT ladder + RotZ + unladder for exp(-i angle/2 Z_q (Z...) Z_p).

    ``through`` chains the ladder across the intermediate qubits (JW
    Z-string); otherwise a single CNOT pair connects q and p directly.
    """
    if through:
        chain = list(range(q, p))
        gates = [qc.cnot(a, a + 1) for a in chain]
        gates.append(qc.rz(p, angle))
        gates.extend(qc.cnot(a, a + 1) for a in reversed(chain))
        return gates
    return [qc.cnot(q, p), qc.rz(p, angle), qc.cnot(q, p)]


def _string_exponential(
    q: int, p: int, axis: str, angle: float, through: bool
) -> List[qc.Gate]:
    """exp(-i angle/2 * P) for P = X_qX_p or Y_qY_p (optionally with the Z-string)."""
    gates = _basis_in(axis, q) + _basis_in(axis, p)
    gates += _string_core(q, p, angle, through)
    gates += _basis_out(axis, q) + _basis_out(axis, p)
    return gates


def gamma_pair(
    q: int, p: int, alpha_qp: float, dt: float, variant: CircuitVariant, n_qubits: int
) -> qc.Circuit:
    """Coupling circuit for one state pair: exp(-i alpha dt/2 (XX + YY)) on (q, p).

    The rotation angle of each string exponential is alpha_qp * dt.  For
    JW_FULL the Z-string through the intermediate qubits is kept; the
    (-1)^(p-q-1) sign it contributes on the single-excitation subspace is
    absorbed into the coupling convention so all variants act identically
    there.
    """
    if q >= p:
        raise ValueError(f"need q < p, got ({q}, {p})")
    angle = float(alpha_qp) * dt
    through = variant is CircuitVariant.JW_FULL
    gates = _string_exponential(q, p, "x", angle, through)
    gates += _string_exponential(q, p, "y", angle, through)
    return qc.Circuit(n_qubits, gates)


def trotter_step(
    system: MolecularSystem,
    field,
    dt: float,
    variant: CircuitVariant = CircuitVariant.SINGLE_OCC,
) -> qc.Circuit:
    """One first-order propagation step: diagonal layer then pair couplings.

    Pairs are emitted in ascending (q, p) order.  The exact molecular
    off-diagonal element is -alpha_qp, so each pair contributes
    exp(+i alpha_qp dt (XX + YY)/2), i.e. string rotation angle -alpha_qp*dt.
    """
    coeffs = pauli_coefficients(system, field)
    n = system.n_states
    circ = qc.Circuit(n)
    circ.extend(diagonal_layer(coeffs.theta, dt).gates)
    pairs = coeffs.coupled_pairs()
    through = variant is CircuitVariant.JW_FULL
    if variant is CircuitVariant.SINGLE_OCC_REORDERED:
        involved = sorted({q for pair in pairs for q in pair})
        for axis in ("x", "y"):
            for q in involved:
                circ.extend(_basis_in(axis, q))
            for q, p in pairs:
                circ.extend(_string_core(q, p, -coeffs.alpha[q, p] * dt, through=False))
            for q in involved:
                circ.extend(_basis_out(axis, q))
    else:
        for q, p in pairs:
            angle = -coeffs.alpha[q, p] * dt
            circ.extend(_string_exponential(q, p, "x", angle, through))
            circ.extend(_string_exponential(q, p, "y", angle, through))
    return circ


def evolution_circuit(
    problem: ControlProblem,
    pulse: PulseParameters,
    grid: PropagationGrid | None = None,
    variant: CircuitVariant = CircuitVariant.SINGLE_OCC,
) -> qc.Circuit:
    """Ground-state preparation followed by K propagation steps.

    The field is sampled at the left endpoint of every step.  Metadata key
    ``step_boundaries`` holds the gate count after preparation and after
    each step, so any j-step prefix can be extracted.
    """
    grid = grid or problem.grid
    if abs(grid.duration - pulse.duration) > 1e-9 * pulse.duration:
        raise ValueError("grid does not cover the pulse duration")
    system = problem.system
    circ = qc.Circuit(system.n_states)
    if problem.initial_state_index != 0:
        raise ValueError("circuit backend encodes the ground state as the initial state")
    circ.extend(prepare_ground(system.n_states).gates)
    boundaries = [len(circ)]
    fields = field_samples(pulse, grid.times[:-1]) if grid.n_steps else np.zeros((0, 3))
    for j in range(grid.n_steps):
        circ.extend(trotter_step(system, fields[j], grid.dt, variant).gates)
        boundaries.append(len(circ))
    circ.metadata["step_boundaries"] = boundaries
    return circ


def decode_populations(
    state: Union[qc.StateVector, qc.DensityMatrix, Dict[str, int]],
    n_states: int,
) -> Tuple[np.ndarray, float]:
    """Electronic-state populations and subspace leakage from an emulator state.

    Accepts a statevector, a density matrix or a sampled histogram; the k-th
    population is read off the one-hot bitstring with qubit k set.
    """
    if isinstance(state, qc.StateVector):
        if state.n_qubits != n_states:
            raise ValueError("state width does not match the number of states")
        probs = state.probabilities()
    elif isinstance(state, qc.DensityMatrix):
        if state.n_qubits != n_states:
            raise ValueError("state width does not match the number of states")
        probs = np.clip(state.diagonal(), 0.0, None)
    else:
        shots = sum(state.values())
        probs = np.zeros(1 << n_states)
        for key, count in state.items():
            probs[int(key, 2)] = count / shots
    populations = np.array([probs[1 << k] for k in range(n_states)])
    leakage = float(probs.sum() - populations.sum())
    return populations, leakage
