"""Gate-level circuit IR and emulator backends.

Statevector simulation applies each gate on its 1-2 qubit subspace (no full
2^n x 2^n matrices).  The density-matrix backend reuses the same kernels on
the flattened density matrix, treating it as a 2n-qubit statevector: ket
qubit q lives at bit n+q, bra qubit q at bit q.  Noise channels (bit-flip,
single-qubit depolarizing) act per gate, per acted qubit, in the fixed order
unitary -> bit-flip -> depolarizing.

Index convention: qubit 0 is the least significant bit of the basis index.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import cos, isfinite, sin
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

try:
    from . import _kernels as _fast
except ImportError:  # pragma: no cover - numba is an optional speedup
    _fast = None


class CircuitError(ValueError):
    """Malformed circuit: bad qubit index, arity or gate kind."""


class ResourceError(RuntimeError):
    """Simulation would exceed the backend's qubit bound."""


DENSITY_QUBIT_LIMIT = 10

ONE_QUBIT_KINDS = frozenset({"X", "H", "S", "SDG", "RZ", "RX", "RY", "PHASE"})
PARAMETRIC_KINDS = frozenset({"RZ", "RX", "RY", "PHASE"})
TWO_QUBIT_KINDS = frozenset({"CNOT"})


@dataclass(frozen=True, slots=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        kind, qubits, angle = self.kind, self.qubits, self.angle
        if kind in ONE_QUBIT_KINDS:
            if len(qubits) != 1 or qubits[0] < 0:
                raise CircuitError(f"{kind} needs one qubit, got {qubits}")
            if kind in PARAMETRIC_KINDS:
                if angle is None or not isfinite(angle):
                    raise CircuitError(f"{kind} needs a finite angle")
            elif angle is not None:
                raise CircuitError(f"{kind} takes no angle")
        elif kind in TWO_QUBIT_KINDS:
            if len(qubits) != 2 or qubits[0] == qubits[1] or min(qubits) < 0:
                raise CircuitError(f"{kind} needs two distinct qubits, got {qubits}")
            if angle is not None:
                raise CircuitError(f"{kind} takes no angle")
        else:
            raise CircuitError(f"unknown gate kind {kind!r}")

    @property
    def arity(self) -> int:
        return len(self.qubits)


def x(q: int) -> Gate:
    return Gate("X", (q,))


def h(q: int) -> Gate:
    return Gate("H", (q,))


def s(q: int) -> Gate:
    return Gate("S", (q,))


def sdg(q: int) -> Gate:
    return Gate("SDG", (q,))


def rz(q: int, angle: float) -> Gate:
    return Gate("RZ", (q,), angle)


def rx(q: int, angle: float) -> Gate:
    return Gate("RX", (q,), angle)


def ry(q: int, angle: float) -> Gate:
    return Gate("RY", (q,), angle)


def phase(q: int, angle: float) -> Gate:
    return Gate("PHASE", (q,), angle)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


_SQ2 = 1.0 / np.sqrt(2.0)
_FIXED_1Q = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def gate_unitary(gate: Gate) -> np.ndarray:
    """Dense unitary of a single gate (2x2, or 4x4 for CNOT in |tc> order)."""
    k = gate.kind
    if k in _FIXED_1Q:
        return _FIXED_1Q[k].copy()
    t = gate.angle
    if k == "RZ":
        return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)
    if k == "RX":
        return np.array(
            [[cos(t / 2), -1j * sin(t / 2)], [-1j * sin(t / 2), cos(t / 2)]], dtype=complex
        )
    if k == "RY":
        return np.array([[cos(t / 2), -sin(t / 2)], [sin(t / 2), cos(t / 2)]], dtype=complex)
    if k == "PHASE":
        return np.array([[1, 0], [0, np.exp(1j * t)]], dtype=complex)
    if k == "CNOT":
        # Basis |b_target b_control>: target flips when control bit is 1.
        u = np.eye(4, dtype=complex)
        u[[1, 3]] = u[[3, 1]]
        return u
    raise CircuitError(f"unknown gate kind {k!r}")


@dataclass
class Circuit:
    """Ordered gate sequence on a fixed-width qubit register."""

    n_qubits: int
    gates: List[Gate] = dc_field(default_factory=list)
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("need at least one qubit")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.n_qubits:
            raise CircuitError(f"gate {gate} exceeds register width {self.n_qubits}")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    def prefix(self, n_gates: int) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates[:n_gates]))

    def dump(self) -> str:
        """One gate per line: KIND q0 [q1] [angle], angles with 17 significant digits."""
        lines = []
        for g in self.gates:
            parts = [g.kind] + [str(q) for q in g.qubits]
            if g.angle is not None:
                parts.append(format(g.angle, ".17g"))
            lines.append(" ".join(parts))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "Circuit":
        circ = cls(n_qubits)
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            try:
                if kind in PARAMETRIC_KINDS:
                    qubits = tuple(int(p) for p in parts[1:-1])
                    angle = float(parts[-1])
                else:
                    qubits = tuple(int(p) for p in parts[1:])
                    angle = None
                circ.append(Gate(kind, qubits, angle))
            except (ValueError, CircuitError) as exc:
                raise CircuitError(f"line {lineno}: {line!r}: {exc}") from exc
        return circ


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate bit-flip and single-qubit depolarizing probabilities by gate arity."""

    p_bitflip_1q: float = 0.0
    p_bitflip_2q: float = 0.0
    p_depol_1q: float = 0.0
    p_depol_2q: float = 0.0

    def __post_init__(self):
        for name in ("p_bitflip_1q", "p_bitflip_2q", "p_depol_1q", "p_depol_2q"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} = {p} outside [0, 1]")

    @property
    def is_trivial(self) -> bool:
        return (
            self.p_bitflip_1q == self.p_bitflip_2q == self.p_depol_1q == self.p_depol_2q == 0.0
        )

    def probabilities(self, arity: int) -> Tuple[float, float]:
        """(bit-flip, depolarizing) probability for a gate of the given arity."""
        if arity == 1:
            return self.p_bitflip_1q, self.p_depol_1q
        return self.p_bitflip_2q, self.p_depol_2q


NOISE_PRESETS: Dict[str, NoiseModel] = {
    "none": NoiseModel(),
    "bf": NoiseModel(p_bitflip_1q=1e-5, p_bitflip_2q=1e-5),
    "sq-depol-1": NoiseModel(p_depol_1q=1e-5, p_bitflip_2q=1e-5),
    "sq-depol-2": NoiseModel(p_depol_1q=5e-5, p_bitflip_2q=5e-5),
    "mixed": NoiseModel(p_depol_1q=5e-5, p_bitflip_1q=5e-5, p_bitflip_2q=5e-5),
}


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude length must be 2^n_qubits")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 1 << self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise ValueError("density matrix must be 2^n x 2^n")

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        psi = state.amplitudes
        return cls(state.n_qubits, np.outer(psi, psi.conj()))

    @classmethod
    def ground(cls, n_qubits: int) -> "DensityMatrix":
        return cls.from_statevector(StateVector.zero(n_qubits))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 1 << n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()


# ---------------------------------------------------------------------------
# Statevector kernels.  `flat` is a 1D complex buffer of length 2^n, mutated
# in place; qubit q is bit q of the index.


def _kernel_1q(flat: np.ndarray, u: np.ndarray, q: int, n: int) -> None:
    view = flat.reshape(1 << (n - 1 - q), 2, 1 << q)
    s0 = view[:, 0, :]
    s1 = view[:, 1, :]
    n0 = u[0, 0] * s0 + u[0, 1] * s1
    n1 = u[1, 0] * s0 + u[1, 1] * s1
    view[:, 0, :] = n0
    view[:, 1, :] = n1


def _kernel_diag(flat: np.ndarray, d0: complex, d1: complex, q: int, n: int) -> None:
    view = flat.reshape(1 << (n - 1 - q), 2, 1 << q)
    if d0 != 1.0:
        view[:, 0, :] *= d0
    view[:, 1, :] *= d1


def _kernel_x(flat: np.ndarray, q: int, n: int) -> None:
    view = flat.reshape(1 << (n - 1 - q), 2, 1 << q)
    view[:, [0, 1], :] = view[:, [1, 0], :]


def _kernel_cnot(flat: np.ndarray, control: int, target: int, n: int) -> None:
    view = flat.reshape([2] * n)
    i0 = [slice(None)] * n
    i0[n - 1 - control] = 1
    i1 = list(i0)
    i0[n - 1 - target] = 0
    i1[n - 1 - target] = 1
    tmp = view[tuple(i0)].copy()
    view[tuple(i0)] = view[tuple(i1)]
    view[tuple(i1)] = tmp


def _apply_gate_flat(flat: np.ndarray, gate: Gate, n: int) -> None:
    k = gate.kind
    if k == "CNOT":
        _kernel_cnot(flat, gate.qubits[0], gate.qubits[1], n)
    elif k == "X":
        _kernel_x(flat, gate.qubits[0], n)
    elif k == "RZ":
        half = 0.5j * gate.angle
        _kernel_diag(flat, np.exp(-half), np.exp(half), gate.qubits[0], n)
    elif k == "PHASE":
        _kernel_diag(flat, 1.0, np.exp(1j * gate.angle), gate.qubits[0], n)
    elif k == "S":
        _kernel_diag(flat, 1.0, 1j, gate.qubits[0], n)
    elif k == "SDG":
        _kernel_diag(flat, 1.0, -1j, gate.qubits[0], n)
    else:
        _kernel_1q(flat, gate_unitary(gate), gate.qubits[0], n)


_GATE_CODES = {
    "X": 0, "H": 1, "S": 2, "SDG": 3, "RZ": 4, "RX": 5, "RY": 6, "PHASE": 7, "CNOT": 8,
}


def _pack_gates(gates: List[Gate]):
    """Flatten a gate list into (codes, q0, q1, 2x2 entries) arrays for the JIT runners."""
    m = len(gates)
    codes = np.empty(m, dtype=np.int64)
    q0s = np.empty(m, dtype=np.int64)
    q1s = np.zeros(m, dtype=np.int64)
    u = np.empty((m, 4), dtype=complex)
    for i, g in enumerate(gates):
        k = g.kind
        codes[i] = _GATE_CODES[k]
        q0s[i] = g.qubits[0]
        if k == "CNOT":
            q1s[i] = g.qubits[1]
            continue
        if k == "X":
            u[i] = (0.0, 1.0, 1.0, 0.0)
        elif k == "H":
            u[i] = (_SQ2, _SQ2, _SQ2, -_SQ2)
        elif k == "S":
            u[i] = (1.0, 0.0, 0.0, 1j)
        elif k == "SDG":
            u[i] = (1.0, 0.0, 0.0, -1j)
        elif k == "RZ":
            half = 0.5j * g.angle
            u[i] = (np.exp(-half), 0.0, 0.0, np.exp(half))
        elif k == "PHASE":
            u[i] = (1.0, 0.0, 0.0, np.exp(1j * g.angle))
        else:  # RX / RY
            c, sn = cos(g.angle / 2), sin(g.angle / 2)
            if k == "RX":
                u[i] = (c, -1j * sn, -1j * sn, c)
            else:
                u[i] = (c, -sn, sn, c)
    return codes, q0s, q1s, u


def apply_statevector(circuit: Circuit, state: StateVector) -> StateVector:
    """Run the circuit on a statevector; returns a new StateVector."""
    if circuit.n_qubits != state.n_qubits:
        raise CircuitError("circuit and state widths differ")
    flat = state.amplitudes.astype(complex, copy=True)
    n = circuit.n_qubits
    if _fast is not None:
        _fast.run_statevector(flat, n, *_pack_gates(circuit.gates))
    else:
        for gate in circuit.gates:
            _apply_gate_flat(flat, gate, n)
    return StateVector(n, flat)


# ---------------------------------------------------------------------------
# Density-matrix backend.  The flattened density matrix is treated as a
# 2n-qubit statevector (ket qubit q at bit n+q, bra at bit q); the bra side
# takes the conjugated unitary.


def _rho_unitary(flat: np.ndarray, gate: Gate, n: int) -> None:
    if gate.kind == "CNOT":
        c, t = gate.qubits
        _kernel_cnot(flat, n + c, n + t, 2 * n)
        _kernel_cnot(flat, c, t, 2 * n)
        return
    q = gate.qubits[0]
    k = gate.kind
    if k == "X":
        _kernel_x(flat, n + q, 2 * n)
        _kernel_x(flat, q, 2 * n)
    elif k in ("RZ", "PHASE", "S", "SDG"):
        u = gate_unitary(gate)
        _kernel_diag(flat, u[0, 0], u[1, 1], n + q, 2 * n)
        _kernel_diag(flat, np.conj(u[0, 0]), np.conj(u[1, 1]), q, 2 * n)
    else:
        u = gate_unitary(gate)
        _kernel_1q(flat, u, n + q, 2 * n)
        _kernel_1q(flat, u.conj(), q, 2 * n)


def _rho_bitflip(flat: np.ndarray, p: float, q: int, n: int) -> None:
    flipped = flat.copy()
    _kernel_x(flipped, n + q, 2 * n)
    _kernel_x(flipped, q, 2 * n)
    flat *= 1.0 - p
    flat += p * flipped


def _rho_depolarize(rho: np.ndarray, p: float, q: int, n: int) -> None:
    """rho -> (1-p) rho + p * (I_q/2 tensor Tr_q rho), in place."""
    view = rho.reshape([2] * (2 * n))
    ka = n - 1 - q          # ket axis among the first n axes
    ba = 2 * n - 1 - q      # bra axis among the last n axes
    i00 = [slice(None)] * (2 * n)
    i00[ka], i00[ba] = 0, 0
    i11 = list(i00)
    i11[ka], i11[ba] = 1, 1
    i01 = list(i00)
    i01[ba] = 1
    i10 = list(i00)
    i10[ka] = 1
    i00, i01, i10, i11 = tuple(i00), tuple(i01), tuple(i10), tuple(i11)
    half_tr = 0.5 * p * (view[i00] + view[i11])
    view[i00] *= 1.0 - p
    view[i00] += half_tr
    view[i11] *= 1.0 - p
    view[i11] += half_tr
    view[i01] *= 1.0 - p
    view[i10] *= 1.0 - p


def apply_density(
    circuit: Circuit,
    state: DensityMatrix,
    noise: Optional[NoiseModel] = None,
) -> DensityMatrix:
    """Run the circuit on a density matrix under a per-gate noise model."""
    if circuit.n_qubits != state.n_qubits:
        raise CircuitError("circuit and state widths differ")
    if circuit.n_qubits > DENSITY_QUBIT_LIMIT:
        raise ResourceError(
            f"density backend supports at most {DENSITY_QUBIT_LIMIT} qubits"
        )
    noise = noise or NoiseModel()
    n = circuit.n_qubits
    rho = state.matrix.astype(complex, copy=True)
    flat = rho.reshape(-1)
    if _fast is not None:
        _fast.run_density(
            flat, n, *_pack_gates(circuit.gates),
            noise.p_bitflip_1q, noise.p_bitflip_2q, noise.p_depol_1q, noise.p_depol_2q,
        )
        return DensityMatrix(n, rho)
    for gate in circuit.gates:
        _rho_unitary(flat, gate, n)
        p_bf, p_dep = noise.probabilities(gate.arity)
        if p_bf > 0.0:
            for q in gate.qubits:
                _rho_bitflip(flat, p_bf, q, n)
        if p_dep > 0.0:
            for q in gate.qubits:
                _rho_depolarize(rho, p_dep, q, n)
    return DensityMatrix(n, rho)


def final_probabilities(circuit: Circuit, noise: Optional[NoiseModel] = None) -> np.ndarray:
    """Measurement probabilities after running the circuit from |0...0>."""
    if noise is None or noise.is_trivial:
        out = apply_statevector(circuit, StateVector.zero(circuit.n_qubits))
        probs = out.probabilities()
    else:
        out = apply_density(circuit, DensityMatrix.ground(circuit.n_qubits), noise)
        probs = np.clip(out.diagonal(), 0.0, None)
    return probs / probs.sum()


def bitstring(index: int, n_qubits: int) -> str:
    """Binary rendering with qubit 0 as the rightmost character."""
    return format(index, f"0{n_qubits}b")


def sample_counts(
    circuit: Circuit,
    noise: Optional[NoiseModel],
    shots: int,
    seed: int,
) -> Dict[str, int]:
    """Seeded shot histogram over measured bitstrings; same seed, same histogram."""
    if shots < 1:
        raise ValueError("need at least one shot")
    probs = final_probabilities(circuit, noise)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return {
        bitstring(i, circuit.n_qubits): int(c) for i, c in enumerate(counts) if c > 0
    }


def counts_to_csv(counts: Dict[str, int], path) -> None:
    with open(path, "w") as fh:
        fh.write("bitstring,count\n")
        for key in sorted(counts):
            fh.write(f"{key},{counts[key]}\n")


def fidelity_to_pure(reference: StateVector, rho: DensityMatrix) -> float:
    """Uhlmann fidelity <psi|rho|psi> against a pure reference state."""
    if reference.n_qubits != rho.n_qubits:
        raise ValueError("dimension mismatch")
    psi = reference.amplitudes
    return float(np.real(psi.conj() @ rho.matrix @ psi))


def gate_counts(circuit: Circuit) -> Dict[str, int]:
    """Per-kind gate tallies plus one_qubit/two_qubit totals."""
    counts: Dict[str, int] = {}
    one_q = two_q = 0
    for gate in circuit.gates:
        counts[gate.kind] = counts.get(gate.kind, 0) + 1
        if gate.arity == 1:
            one_q += 1
        else:
            two_q += 1
    counts["one_qubit"] = one_q
    counts["two_qubit"] = two_q
    return counts
