"""Optimal control of few-level molecular systems driven by shaped laser pulses.

The package couples classical reference propagators (first-order Euler and
exact step-exponential) with a gate-level circuit backend that synthesizes
Trotterized evolution circuits for a built-in noisy emulator, and optimizes
the pulse Fourier amplitudes with a genetic algorithm, Nelder-Mead simplex,
or finite-difference quasi-Newton descent.
"""
from .model import (
    ControlProblem,
    MolecularSystem,
    PropagationGrid,
    PulseParameters,
    field_at,
    field_samples,
    fluence,
    hamiltonian_at,
    objective_j,
)
from .reference import (
    ComparisonError,
    PropagationDivergedError,
    WavefunctionTrajectory,
    max_abs_deviation,
    propagate_euler,
    propagate_exact,
)
from .circuit import (
    Circuit,
    CircuitError,
    DensityMatrix,
    Gate,
    NoiseModel,
    NOISE_PRESETS,
    ResourceError,
    StateVector,
    apply_density,
    apply_statevector,
    fidelity_to_pure,
    final_probabilities,
    gate_counts,
    sample_counts,
)
from .encoding import (
    CircuitVariant,
    PauliCoefficients,
    decode_populations,
    diagonal_layer,
    evolution_circuit,
    gamma_pair,
    pauli_coefficients,
    prepare_ground,
    trotter_step,
)
from .fixtures import fixture_problem, load_system
from .optimize import (
    BackendSpec,
    EvalResult,
    GaConfig,
    GaPhase,
    OptimizationRun,
    evaluate,
    ga_run,
    nelder_mead_run,
    quasi_newton_run,
    resonant_guess,
    table_schedule_3_states,
)

__version__ = "0.1.0"
