"""Classical propagation oracles and trajectory comparison.

Two integrators share the left-endpoint piecewise-constant field convention:
a deliberately naive first-order Euler scheme (no renormalization, so norm
drift stays visible) and an exact per-step matrix-exponential propagator
built from the eigendecomposition of the symmetric Hamiltonian.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import ControlProblem, PropagationGrid, PulseParameters, field_samples, hamiltonian_at


class PropagationDivergedError(RuntimeError):
    """Raised when an integrator produces non-finite amplitudes."""


class ComparisonError(ValueError):
    """Raised when two trajectories live on different time grids."""


@dataclass(frozen=True)
class WavefunctionTrajectory:
    """CI-basis wavefunction history: states[j] are the coefficients c_k(t_j)."""

    times: np.ndarray
    states: np.ndarray  # (K+1, Q) complex

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _initial_state(problem: ControlProblem) -> np.ndarray:
    c0 = np.zeros(problem.system.n_states, dtype=complex)
    c0[problem.initial_state_index] = 1.0
    return c0


def propagate_euler(
    problem: ControlProblem,
    pulse: PulseParameters,
    dt_fine: float,
    output_grid: PropagationGrid | None = None,
) -> WavefunctionTrajectory:
    """First-order Euler integration c(t+dt) = c(t) - i H(t) c(t) dt.

    Integrates on the fine step and stores the state on ``output_grid``
    (default: the problem grid), which must be commensurate with dt_fine.
    """
    grid = output_grid or problem.grid
    n_fine = round(pulse.duration / dt_fine)
    if abs(n_fine * dt_fine - pulse.duration) > 1e-9 * pulse.duration:
        raise ValueError(f"dt_fine = {dt_fine} does not divide T = {pulse.duration}")
    stride = n_fine // grid.n_steps
    if stride * grid.n_steps != n_fine:
        raise ValueError("output grid not commensurate with the fine step")

    fields = field_samples(pulse, np.arange(n_fine) * dt_fine)
    dip = problem.system.dipole
    energies = problem.system.energies

    c = _initial_state(problem)
    out = np.empty((grid.n_steps + 1, len(c)), dtype=complex)
    out[0] = c
    for j in range(n_fine):
        h = -np.tensordot(fields[j], dip, axes=([0], [0]))
        h[np.diag_indices_from(h)] += energies
        c = c - 1j * dt_fine * (h @ c)
        if j % stride == stride - 1:
            out[(j + 1) // stride] = c
    if not np.all(np.isfinite(out)):
        raise PropagationDivergedError("Euler propagation produced non-finite amplitudes")
    return WavefunctionTrajectory(times=grid.times, states=out)


def propagate_exact(
    problem: ControlProblem,
    pulse: PulseParameters,
    grid: PropagationGrid | None = None,
) -> WavefunctionTrajectory:
    """Piecewise-constant exact propagation c(t_{j+1}) = exp(-i H(t_j) dt) c(t_j)."""
    grid = grid or problem.grid
    fields = field_samples(pulse, grid.times[:-1]) if grid.n_steps else np.zeros((0, 3))
    c = _initial_state(problem)
    out = np.empty((grid.n_steps + 1, len(c)), dtype=complex)
    out[0] = c
    for j in range(grid.n_steps):
        h = hamiltonian_at(problem.system, fields[j])
        try:
            evals, evecs = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise PropagationDivergedError(f"eigendecomposition failed at step {j}") from exc
        phases = np.exp(-1j * evals * grid.dt)
        c = evecs @ (phases * (evecs.conj().T @ c))
        out[j + 1] = c
    return WavefunctionTrajectory(times=grid.times, states=out)


def step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) for a real symmetric h, via eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T


def max_abs_deviation(a: WavefunctionTrajectory, b: WavefunctionTrajectory) -> float:
    """Largest pointwise population deviation between two trajectories."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, atol=1e-9):
        raise ComparisonError("trajectories live on different time grids")
    return float(np.max(np.abs(a.populations - b.populations)))


def trajectory_to_csv(traj: WavefunctionTrajectory, path, populations_only: bool = False) -> None:
    """Write a trajectory as CSV: time plus Re/Im amplitudes or populations."""
    q = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if populations_only:
            writer.writerow(["time"] + [f"pop_{k}" for k in range(q)])
            for t, row in zip(traj.times, traj.populations):
                writer.writerow([repr(float(t))] + [repr(float(p)) for p in row])
        else:
            header = ["time"]
            for k in range(q):
                header += [f"re_c{k}", f"im_c{k}"]
            writer.writerow(header)
            for t, row in zip(traj.times, traj.states):
                cells = [repr(float(t))]
                for c in row:
                    cells += [repr(float(c.real)), repr(float(c.imag))]
                writer.writerow(cells)
