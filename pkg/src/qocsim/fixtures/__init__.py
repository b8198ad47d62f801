"""Bundled synthetic molecular systems for tests, benchmarks and examples.

``cyan3`` is a 3-level system with a strong ground-to-first-excited
transition at 0.125 hartree; ``cyan11`` is an 11-level system with a dense
excited-state manifold.  Both are synthetic: energies and dipoles were
chosen by hand, and expected dynamics are always derived from the classical
propagators, never asserted from external data.
"""
from __future__ import annotations

import importlib.resources

import numpy as np

from ..model import ControlProblem, MolecularSystem, PropagationGrid, PulseParameters

_DEFAULT_DURATION = 250.0


def load_system(name: str) -> MolecularSystem:
    ref = importlib.resources.files(__package__) / f"{name}.json"
    with importlib.resources.as_file(ref) as path:
        return MolecularSystem.load(path)


def default_harmonics(system: MolecularSystem, duration: float = _DEFAULT_DURATION) -> int:
    """Smallest M with omega_M above the highest state energy."""
    top = float(system.energies[-1])
    return int(np.ceil(top * duration / np.pi)) + 1


def pulse_template(
    system: MolecularSystem,
    duration: float = _DEFAULT_DURATION,
    amplitude_clamp: float = 0.005,
    include_dc: bool = True,
) -> PulseParameters:
    m = default_harmonics(system, duration)
    return PulseParameters(
        duration=duration,
        n_harmonics=m,
        amplitudes=np.zeros((3, m + 1)),
        include_dc=include_dc,
        amplitude_clamp=amplitude_clamp,
    )


def fixture_problem(
    name: str = "cyan3",
    dt: float = 1.0,
    duration: float = _DEFAULT_DURATION,
    target_state_index: int = 1,
    penalty_weight: float = 1.0,
    penalty_mode: str = "clamp",
    amplitude_clamp: float = 0.005,
) -> ControlProblem:
    """Ready-made population-transfer problem on a bundled fixture system."""
    system = load_system(name)
    return ControlProblem(
        system=system,
        target_state_index=target_state_index,
        pulse_template=pulse_template(system, duration, amplitude_clamp),
        grid=PropagationGrid.for_duration(duration, dt),
        penalty_weight=penalty_weight,
        penalty_mode=penalty_mode,
    )
