"""Molecular system data model, laser-field parameterization and control functional.

Units are atomic units throughout: energies in hartree, time in a.u. of time,
field amplitudes in a.u. of field strength.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

ArrayLike = Union[Sequence[float], np.ndarray]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MolecularSystem:
    """N-level electronic system: state energies and cartesian dipole matrices.

    ``dipole`` has shape (3, Q, Q); each component matrix is real symmetric
    (transition dipoles off-diagonal, permanent dipoles on the diagonal).
    """

    energies: np.ndarray
    dipole: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "energies", _frozen(self.energies))
        object.__setattr__(self, "dipole", _frozen(self.dipole))
        q = self.n_states
        if q < 2:
            raise ValueError("need at least 2 states")
        if self.dipole.shape != (3, q, q):
            raise ValueError(f"dipole must have shape (3, {q}, {q}), got {self.dipole.shape}")
        if not (np.all(np.isfinite(self.energies)) and np.all(np.isfinite(self.dipole))):
            raise ValueError("energies and dipoles must be finite")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be sorted ascending")
        for comp in range(3):
            if not np.allclose(self.dipole[comp], self.dipole[comp].T, atol=1e-12):
                raise ValueError(f"dipole component {comp} is not symmetric")

    @property
    def n_states(self) -> int:
        return len(self.energies)

    def to_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "energies": self.energies.tolist(),
            "dipole_x": self.dipole[0].tolist(),
            "dipole_y": self.dipole[1].tolist(),
            "dipole_z": self.dipole[2].tolist(),
            "units": "atomic",
            **({"labels": list(self.labels)} if self.labels else {}),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MolecularSystem":
        dip = np.array([d["dipole_x"], d["dipole_y"], d["dipole_z"]], dtype=float)
        labels = tuple(d["labels"]) if d.get("labels") else None
        sys_ = cls(energies=np.array(d["energies"], dtype=float), dipole=dip, labels=labels)
        if "n_states" in d and d["n_states"] != sys_.n_states:
            raise ValueError("n_states inconsistent with energies length")
        return sys_

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "MolecularSystem":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class PulseParameters:
    """Harmonic laser pulse: E_a(t) = sum_alpha u_alpha [a_0a + sum_j a_ja sin(j pi t / T)].

    ``amplitudes`` has shape (3, M + 1); column j holds the amplitudes of the
    harmonic with frequency omega_j = j*pi/T.  Column 0 is the constant (dc)
    term and is ignored when ``include_dc`` is false.
    """

    duration: float
    n_harmonics: int
    amplitudes: np.ndarray
    include_dc: bool = False
    amplitude_clamp: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.n_harmonics < 1:
            raise ValueError("need at least one harmonic")
        if self.amplitudes.shape != (3, self.n_harmonics + 1):
            raise ValueError(
                f"amplitudes must have shape (3, {self.n_harmonics + 1}), got {self.amplitudes.shape}"
            )
        if self.amplitude_clamp is not None:
            if np.any(np.abs(self.amplitudes) > self.amplitude_clamp + 1e-15):
                raise ValueError("amplitudes exceed the configured clamp")

    @property
    def frequencies(self) -> np.ndarray:
        """omega_j = j*pi/T for j = 0..M."""
        return np.arange(self.n_harmonics + 1) * np.pi / self.duration

    def with_amplitudes(self, amplitudes: np.ndarray) -> "PulseParameters":
        return PulseParameters(
            duration=self.duration,
            n_harmonics=self.n_harmonics,
            amplitudes=amplitudes,
            include_dc=self.include_dc,
            amplitude_clamp=self.amplitude_clamp,
        )

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "n_harmonics": self.n_harmonics,
            "include_dc": self.include_dc,
            "amplitudes": self.amplitudes.tolist(),
            "amplitude_clamp": self.amplitude_clamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PulseParameters":
        return cls(
            duration=float(d["duration"]),
            n_harmonics=int(d["n_harmonics"]),
            amplitudes=np.array(d["amplitudes"], dtype=float),
            include_dc=bool(d.get("include_dc", False)),
            amplitude_clamp=d.get("amplitude_clamp"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "PulseParameters":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class PropagationGrid:
    """Uniform time grid t_j = j*dt, j = 0..n_steps."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")

    @property
    def duration(self) -> float:
        return self.dt * self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    @classmethod
    def for_duration(cls, duration: float, dt: float) -> "PropagationGrid":
        n = round(duration / dt)
        if abs(n * dt - duration) > 1e-9 * max(1.0, abs(duration)):
            raise ValueError(f"dt = {dt} does not divide duration = {duration}")
        return cls(dt=dt, n_steps=n)


@dataclass(frozen=True)
class ControlProblem:
    """Population-transfer control problem: drive initial -> target over [0, T].

    ``penalty_mode`` selects how field intensity is discouraged: via the
    fluence term in J ("functional"), via a hard amplitude clamp on the
    genome ("clamp", weight treated as 0 in J), or both.
    """

    system: MolecularSystem
    target_state_index: int
    pulse_template: PulseParameters
    grid: PropagationGrid
    initial_state_index: int = 0
    penalty_weight: float = 0.0
    penalty_mode: str = "functional"

    def __post_init__(self):
        q = self.system.n_states
        if not 0 <= self.target_state_index < q:
            raise ValueError("target state index out of range")
        if not 0 <= self.initial_state_index < q:
            raise ValueError("initial state index out of range")
        if self.target_state_index == self.initial_state_index:
            raise ValueError("target must differ from the initial state")
        if self.penalty_mode not in ("functional", "clamp", "both"):
            raise ValueError(f"unknown penalty mode {self.penalty_mode!r}")
        if abs(self.grid.duration - self.pulse_template.duration) > 1e-9 * self.pulse_template.duration:
            raise ValueError("grid does not cover the pulse duration")

    @property
    def effective_weight(self) -> float:
        """Penalty weight entering J; zero when the clamp replaces the fluence term."""
        return 0.0 if self.penalty_mode == "clamp" else self.penalty_weight


def field_at(pulse: PulseParameters, t: float) -> np.ndarray:
    """Electric field 3-vector at time t in [0, T]."""
    if t < 0 or t > pulse.duration * (1 + 1e-12):
        raise ValueError(f"t = {t} outside the pulse window [0, {pulse.duration}]")
    j = np.arange(1, pulse.n_harmonics + 1)
    basis = np.sin(j * np.pi * t / pulse.duration)
    out = pulse.amplitudes[:, 1:] @ basis
    if pulse.include_dc:
        out = out + pulse.amplitudes[:, 0]
    return out


def field_samples(pulse: PulseParameters, times: np.ndarray) -> np.ndarray:
    """Field at many times at once; returns shape (len(times), 3)."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > pulse.duration * (1 + 1e-12)):
        raise ValueError("times outside the pulse window")
    j = np.arange(1, pulse.n_harmonics + 1)
    basis = np.sin(np.outer(times, j) * np.pi / pulse.duration)  # (T, M)
    out = basis @ pulse.amplitudes[:, 1:].T  # (T, 3)
    if pulse.include_dc:
        out = out + pulse.amplitudes[:, 0]
    return out


def hamiltonian_at(system: MolecularSystem, field: ArrayLike) -> np.ndarray:
    """Q x Q dipole-coupled Hamiltonian for an instantaneous field value."""
    field = np.asarray(field, dtype=float)
    if field.shape != (3,) or not np.all(np.isfinite(field)):
        raise ValueError("field must be a finite 3-vector")
    h = -np.tensordot(field, system.dipole, axes=([0], [0]))
    h[np.diag_indices_from(h)] += system.energies
    return h


def fluence(pulse: PulseParameters, grid: PropagationGrid, weight: ArrayLike = 1.0) -> float:
    """Trapezoidal quadrature of weight(t) * |E(t)|^2 over [0, T] on the grid.

    ``weight`` may be a scalar (constant alpha) or a per-grid-point vector.
    """
    if abs(grid.duration - pulse.duration) > 1e-9 * pulse.duration:
        raise ValueError("grid inconsistent with pulse duration")
    e = field_samples(pulse, grid.times)
    intensity = np.sum(e * e, axis=1)
    w = np.asarray(weight, dtype=float)
    if w.ndim == 0:
        integrand = float(w) * intensity
    elif w.shape == intensity.shape:
        integrand = w * intensity
    else:
        raise ValueError("weight must be scalar or one value per grid point")
    return float(np.trapezoid(integrand, dx=grid.dt))


def objective_j(
    target_population: float,
    pulse: PulseParameters,
    grid: PropagationGrid,
    weight: ArrayLike = 1.0,
) -> float:
    """Control functional J = P_target(T) - integral of weight * |E|^2."""
    if not -1e-9 <= target_population <= 1 + 1e-6:
        raise ValueError(f"target population {target_population} outside [0, 1]")
    return float(target_population) - fluence(pulse, grid, weight)
