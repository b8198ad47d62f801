"""Shared fixtures and independent dense-matrix oracles.

The oracles here deliberately avoid the package's simulation kernels: gates
are embedded as explicit Kronecker products and channels act on dense
density matrices, so emulator results are checked against independently
constructed linear algebra.
"""
import numpy as np
import pytest
import scipy.linalg

from qocsim.fixtures import fixture_problem, load_system

# ---------------------------------------------------------------------------
# Dense gate oracle (qubit 0 = least significant bit)

_SQ2 = 1.0 / np.sqrt(2.0)

ORACLE_1Q = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.diag([1.0, 1.0j]),
    "SDG": np.diag([1.0, -1.0j]),
}


def oracle_gate_matrix(gate) -> np.ndarray:
    """2x2 matrix of a one-qubit gate, built from first principles."""
    k, t = gate.kind, gate.angle
    if k in ORACLE_1Q:
        return ORACLE_1Q[k]
    if k == "RZ":
        return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    if k == "RX":
        return scipy.linalg.expm(-0.5j * t * np.array([[0, 1], [1, 0]], dtype=complex))
    if k == "RY":
        return scipy.linalg.expm(-0.5j * t * np.array([[0, -1j], [1j, 0]], dtype=complex))
    if k == "PHASE":
        return np.diag([1.0, np.exp(1j * t)])
    raise ValueError(k)


def embed_1q(u: np.ndarray, q: int, n: int) -> np.ndarray:
    """Kronecker embedding of a 2x2 matrix on qubit q of an n-qubit register."""
    out = np.array([[1.0 + 0j]])
    for k in range(n - 1, -1, -1):
        out = np.kron(out, u if k == q else np.eye(2))
    return out


def embed_cnot(control: int, target: int, n: int) -> np.ndarray:
    """Permutation matrix of CNOT(control, target) on n qubits."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        out[j, i] = 1.0
    return out


def dense_unitary(circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary of a circuit via the dense oracle."""
    n = circuit.n_qubits
    out = np.eye(1 << n, dtype=complex)
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            u = embed_cnot(gate.qubits[0], gate.qubits[1], n)
        else:
            u = embed_1q(oracle_gate_matrix(gate), gate.qubits[0], n)
        out = u @ out
    return out


def dense_bitflip(rho: np.ndarray, p: float, q: int, n: int) -> np.ndarray:
    xq = embed_1q(ORACLE_1Q["X"], q, n)
    return (1.0 - p) * rho + p * (xq @ rho @ xq)


def dense_depolarize(rho: np.ndarray, p: float, q: int, n: int) -> np.ndarray:
    """(1-p) rho + p * (I_q/2 tensor Tr_q rho) via explicit tensor reshuffle."""
    t = rho.reshape([2] * (2 * n))
    ka, ba = n - 1 - q, 2 * n - 1 - q
    traced = np.trace(t, axis1=ka, axis2=ba)  # shape 2^{n-1} x 2^{n-1} tensor
    replaced = np.zeros_like(t)
    for b in range(2):
        idx = [slice(None)] * (2 * n)
        idx[ka], idx[ba] = b, b
        replaced[tuple(idx)] = 0.5 * traced
    return ((1.0 - p) * t + p * replaced).reshape(rho.shape)


def dense_noisy_circuit(circuit, rho: np.ndarray, noise) -> np.ndarray:
    """Dense density-matrix oracle: unitary -> bit-flip -> depolarizing per gate."""
    n = circuit.n_qubits
    rho = rho.copy()
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            u = embed_cnot(gate.qubits[0], gate.qubits[1], n)
        else:
            u = embed_1q(oracle_gate_matrix(gate), gate.qubits[0], n)
        rho = u @ rho @ u.conj().T
        p_bf, p_dep = noise.probabilities(gate.arity)
        if p_bf > 0.0:
            for q in gate.qubits:
                rho = dense_bitflip(rho, p_bf, q, n)
        if p_dep > 0.0:
            for q in gate.qubits:
                rho = dense_depolarize(rho, p_dep, q, n)
    return rho


def random_circuit(n_qubits: int, n_gates: int, rng) -> "object":
    """Random circuit over the full gate alphabet."""
    from qocsim import circuit as qc

    kinds = ["X", "H", "S", "SDG", "RZ", "RX", "RY", "PHASE", "CNOT"]
    circ = qc.Circuit(n_qubits)
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CNOT" and n_qubits >= 2:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            circ.append(qc.cnot(int(a), int(b)))
        elif kind == "CNOT":
            circ.append(qc.x(0))
        else:
            angle = float(rng.normal()) if kind in ("RZ", "RX", "RY", "PHASE") else None
            circ.append(qc.Gate(kind, (int(rng.integers(n_qubits)),), angle))
    return circ


def random_system(n_states: int, rng, coupling_scale: float = 1.0):
    """Random symmetric-dipole system with ascending energies."""
    from qocsim.model import MolecularSystem

    energies = np.sort(rng.uniform(0.0, 0.3, n_states))
    energies[0] = 0.0
    dip = rng.normal(scale=coupling_scale, size=(3, n_states, n_states))
    dip = (dip + dip.transpose(0, 2, 1)) / 2.0
    return MolecularSystem(energies=energies, dipole=dip)


# ---------------------------------------------------------------------------
# Fixtures


@pytest.fixture(scope="session")
def cyan3():
    return load_system("cyan3")


@pytest.fixture(scope="session")
def problem3():
    return fixture_problem()
