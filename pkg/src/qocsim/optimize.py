"""Classical optimization layer: objective evaluation through any backend,
the genetic algorithm with exploration/convergence phases, Nelder-Mead and a
finite-difference BFGS reference.

Determinism contract: every random draw comes from a stream derived from
(seed, generation, individual index), so evaluation order and parallel
scheduling cannot change results.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.optimize

from . import circuit as qc
from .encoding import CircuitVariant, decode_populations, evolution_circuit
from .model import ControlProblem, PulseParameters, fluence
from .reference import propagate_euler, propagate_exact

CLASSICAL_METHODS = ("classical-euler", "classical-exact")


class EvaluationError(RuntimeError):
    """Backend propagation failed for a particular genome."""


@dataclass(frozen=True)
class BackendSpec:
    """How to propagate and read out the target population for one genome."""

    method: str = "classical-exact"
    variant: CircuitVariant = CircuitVariant.SINGLE_OCC
    noise: Optional[qc.NoiseModel] = None
    readout: str = "exact"
    shots: int = 2048
    euler_dt: float = 0.01

    def __post_init__(self):
        if self.method not in CLASSICAL_METHODS + ("circuit",):
            raise ValueError(f"unknown backend method {self.method!r}")
        if self.readout not in ("exact", "sampled"):
            raise ValueError(f"unknown readout mode {self.readout!r}")
        if self.shots < 1:
            raise ValueError("shots must be positive")

    @property
    def is_deterministic(self) -> bool:
        return self.readout == "exact"

    def describe(self) -> str:
        if self.method != "circuit":
            return self.method
        noisy = "noisy" if self.noise is not None and not self.noise.is_trivial else "ideal"
        return f"circuit({self.variant.value},{noisy},{self.readout})"

    @classmethod
    def from_dict(cls, d: dict) -> "BackendSpec":
        noise = d.get("noise")
        if isinstance(noise, str):
            noise = qc.NOISE_PRESETS[noise]
        elif isinstance(noise, dict):
            noise = qc.NoiseModel(**noise)
        return cls(
            method=d.get("method", "classical-exact"),
            variant=CircuitVariant.from_name(d.get("variant", "single-occ")),
            noise=noise,
            readout=d.get("readout", "exact"),
            shots=int(d.get("shots", 2048)),
            euler_dt=float(d.get("euler_dt", 0.01)),
        )


@dataclass(frozen=True)
class EvalResult:
    j: float
    population: float
    fluence: float  # bare integral of |E|^2, no alpha weight


@dataclass
class Individual:
    amplitudes: np.ndarray
    result: Optional[EvalResult] = None


def _readout_seed(seed: int, generation: int, index: int) -> int:
    return int(np.random.SeedSequence((seed, generation, index)).generate_state(1)[0])


def evaluate(
    amplitudes: np.ndarray,
    problem: ControlProblem,
    backend: BackendSpec,
    seed: int = 0,
) -> EvalResult:
    """Propagate one genome and return (J, target population, bare fluence)."""
    pulse = problem.pulse_template.with_amplitudes(amplitudes)
    target = problem.target_state_index
    try:
        if backend.method == "classical-euler":
            traj = propagate_euler(problem, pulse, backend.euler_dt)
            population = float(traj.populations[-1, target])
        elif backend.method == "classical-exact":
            traj = propagate_exact(problem, pulse)
            population = float(traj.populations[-1, target])
        else:
            circ = evolution_circuit(problem, pulse, problem.grid, backend.variant)
            if backend.readout == "sampled":
                counts = qc.sample_counts(circ, backend.noise, backend.shots, seed)
                pops, _ = decode_populations(counts, problem.system.n_states)
            elif backend.noise is None or backend.noise.is_trivial:
                out = qc.apply_statevector(circ, qc.StateVector.zero(circ.n_qubits))
                pops, _ = decode_populations(out, problem.system.n_states)
            else:
                out = qc.apply_density(circ, qc.DensityMatrix.ground(circ.n_qubits), backend.noise)
                pops, _ = decode_populations(out, problem.system.n_states)
            population = float(pops[target])
    except (qc.CircuitError, qc.ResourceError):
        raise
    except Exception as exc:
        raise EvaluationError(f"backend {backend.describe()} failed: {exc}") from exc
    bare = fluence(pulse, problem.grid, 1.0)
    j = population - problem.effective_weight * bare
    return EvalResult(j=j, population=population, fluence=bare)


# ---------------------------------------------------------------------------
# Genetic algorithm


@dataclass(frozen=True)
class GaPhase:
    mode: str  # "exploration" | "convergence"
    generations: int
    population_size: int
    mutation_sigma: float

    def __post_init__(self):
        if self.mode not in ("exploration", "convergence"):
            raise ValueError(f"unknown phase mode {self.mode!r}")
        if self.generations < 1 or self.population_size < 1:
            raise ValueError("generations and population_size must be positive")


@dataclass(frozen=True)
class GaConfig:
    phases: Tuple[GaPhase, ...]
    selected_count: int = 10
    recombination_probability: float = 1.0
    mutation_probability: float = 0.2
    mutation_mean: float = 0.0
    amplitude_clamp: float = 0.005
    mutate_all: bool = True
    mutated_individuals: int = 10
    early_stop_population: Optional[float] = 0.95
    seed: int = 0

    def __post_init__(self):
        if not self.phases:
            raise ValueError("need at least one phase")
        for phase in self.phases:
            if self.selected_count > phase.population_size:
                raise ValueError("selected_count exceeds a phase's population size")
        for p in (self.recombination_probability, self.mutation_probability):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "GaConfig":
        phases = tuple(
            GaPhase(
                mode=p["mode"],
                generations=int(p["generations"]),
                population_size=int(p["population_size"]),
                mutation_sigma=float(p["mutation_sigma"]),
            )
            for p in d["phases"]
        )
        kwargs = {k: d[k] for k in (
            "selected_count", "recombination_probability", "mutation_probability",
            "mutation_mean", "amplitude_clamp", "mutate_all", "mutated_individuals",
            "early_stop_population", "seed",
        ) if k in d}
        return cls(phases=phases, **kwargs)


def table_schedule_3_states(seed: int = 0, clamp: float = 0.005) -> GaConfig:
    """Reference GA settings for a 3-state problem: 40 individuals,
    15 exploration + 15 convergence generations, sigma 0.001 / 0.0001."""
    return GaConfig(
        phases=(
            GaPhase("exploration", 15, 40, 1e-3),
            GaPhase("convergence", 15, 40, 1e-4),
        ),
        amplitude_clamp=clamp,
        seed=seed,
    )


@dataclass
class OptimizationRun:
    history: List[dict]
    best_amplitudes: np.ndarray
    best_result: EvalResult
    backend: str
    seed: int
    n_evaluations: int
    warnings: List[str] = dc_field(default_factory=list)

    def history_to_csv(self, path, comment: Optional[str] = None) -> None:
        with open(path, "w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["iteration", "best_J", "best_population", "best_fluence"])
            for rec in self.history:
                writer.writerow([
                    rec["iteration"],
                    repr(rec["best_j"]),
                    repr(rec["best_population"]),
                    repr(rec["best_fluence"]),
                ])


def select(population: Sequence[Individual], m: int) -> List[Individual]:
    """Top-m individuals by J; ties broken by lower fluence, then input order."""
    for ind in population:
        if ind.result is None:
            raise RuntimeError("cannot select from an unevaluated population")
    order = sorted(
        range(len(population)),
        key=lambda i: (-population[i].result.j, population[i].result.fluence, i),
    )
    return [population[i] for i in order[:m]]


def recombine(parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform crossover: each amplitude comes from either parent with probability 0.5."""
    if parent_a.shape != parent_b.shape:
        raise ValueError("parent shapes differ")
    mask = rng.random(parent_a.shape) < 0.5
    return np.where(mask, parent_a, parent_b)


def mutate(
    amplitudes: np.ndarray,
    clamp: float,
    sigma: float,
    mean: float,
    probability: float,
    rng: np.random.Generator,
    frozen_dc: bool = False,
) -> np.ndarray:
    """Gaussian mutation of each amplitude with the given probability, then clamp."""
    mask = rng.random(amplitudes.shape) < probability
    noise = rng.normal(mean, sigma, amplitudes.shape)
    out = np.clip(amplitudes + mask * noise, -clamp, clamp)
    if frozen_dc:
        out[:, 0] = 0.0
    return out


def _random_genome(shape, clamp, rng, frozen_dc) -> np.ndarray:
    genome = rng.uniform(-clamp, clamp, shape)
    if frozen_dc:
        genome[:, 0] = 0.0
    return genome


def ga_run(
    problem: ControlProblem,
    config: GaConfig,
    backend: BackendSpec,
) -> OptimizationRun:
    """Genetic optimization of the pulse amplitudes.

    Per generation: evaluate, select the best m, rebuild the population by
    recombining random selected pairs, mutate, and carry one unmodified
    elite copy of the incumbent best.  When the best target population
    reaches ``early_stop_population`` the schedule jumps to the final phase.
    """
    template = problem.pulse_template
    shape = template.amplitudes.shape
    frozen_dc = not template.include_dc
    clamp = config.amplitude_clamp
    seed = config.seed

    schedule: List[GaPhase] = []
    for phase in config.phases:
        schedule.extend([phase] * phase.generations)

    population = [
        Individual(_random_genome(shape, clamp, np.random.default_rng([seed, 0, i]), frozen_dc))
        for i in range(schedule[0].population_size)
    ]

    history: List[dict] = []
    n_evaluations = 0
    jumped = False
    g = 0
    while g < len(schedule):
        for idx, ind in enumerate(population):
            if ind.result is None:
                ind.result = evaluate(
                    ind.amplitudes, problem, backend, seed=_readout_seed(seed, g, idx)
                )
                n_evaluations += 1
        best = select(population, 1)[0]
        js = np.array([ind.result.j for ind in population])
        history.append({
            "iteration": g,
            "phase": schedule[g].mode,
            "best_j": best.result.j,
            "best_population": best.result.population,
            "best_fluence": best.result.fluence,
            "mean_j": float(js.mean()),
            "std_j": float(js.std()),
            "best_amplitudes": best.amplitudes.copy(),
        })

        threshold = config.early_stop_population
        if (
            not jumped
            and threshold is not None
            and best.result.population >= threshold
            and schedule[g] is not config.phases[-1]
        ):
            final = config.phases[-1]
            schedule = schedule[: g + 1] + [final] * final.generations
            jumped = True

        if g + 1 >= len(schedule):
            break
        next_phase = schedule[g + 1]
        selected = select(population, config.selected_count)
        children = [Individual(best.amplitudes.copy(), best.result)]  # elite
        n_children = next_phase.population_size - 1
        mutate_indices = None
        if not config.mutate_all:
            pick_rng = np.random.default_rng([seed, g + 1, 2**31])
            k = min(config.mutated_individuals, n_children)
            mutate_indices = set(pick_rng.choice(n_children, size=k, replace=False).tolist())
        for i in range(n_children):
            rng = np.random.default_rng([seed, g + 1, i])
            pa, pb = rng.choice(config.selected_count, size=2, replace=False)
            if rng.random() < config.recombination_probability:
                genome = recombine(selected[pa].amplitudes, selected[pb].amplitudes, rng)
            else:
                genome = selected[pa].amplitudes.copy()
            if config.mutate_all or i in mutate_indices:
                genome = mutate(
                    genome, clamp, next_phase.mutation_sigma, config.mutation_mean,
                    config.mutation_probability, rng, frozen_dc,
                )
            children.append(Individual(genome))
        population = children
        g += 1

    best = select(population, 1)[0]
    return OptimizationRun(
        history=history,
        best_amplitudes=best.amplitudes.copy(),
        best_result=best.result,
        backend=backend.describe(),
        seed=seed,
        n_evaluations=n_evaluations,
    )


# ---------------------------------------------------------------------------
# Simplex and gradient references


def resonant_guess(problem: ControlProblem, amplitude: float = 0.01) -> np.ndarray:
    """Sinusoidal guess on the harmonic closest to the target transition,
    with the given amplitude along all three components."""
    template = problem.pulse_template
    gap = (
        problem.system.energies[problem.target_state_index]
        - problem.system.energies[problem.initial_state_index]
    )
    freqs = template.frequencies
    j_min = 1  # never the dc column
    j_star = j_min + int(np.argmin(np.abs(freqs[j_min:] - gap)))
    genome = np.zeros(template.amplitudes.shape)
    genome[:, j_star] = amplitude
    return genome


def _active_mask(template: PulseParameters) -> np.ndarray:
    mask = np.ones(template.amplitudes.shape, dtype=bool)
    if not template.include_dc:
        mask[:, 0] = False
    return mask


def _pack(genome: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return genome[mask].copy()


def _unpack(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    genome = np.zeros(mask.shape)
    genome[mask] = x
    return genome


def _initial_simplex(x0: np.ndarray, zero_step: float = 0.00025, scale: float = 1.05) -> np.ndarray:
    """Vertex i perturbs coordinate i: zero components become ``zero_step``,
    nonzero ones are scaled by 5%."""
    d = len(x0)
    simplex = np.tile(x0, (d + 1, 1))
    for i in range(d):
        if x0[i] == 0.0:
            simplex[i + 1, i] = zero_step
        else:
            simplex[i + 1, i] *= scale
    return simplex


def simplex_minimize(
    fun: Callable[[np.ndarray], Tuple[float, object]],
    x0: np.ndarray,
    max_iter: int,
    on_iteration: Optional[Callable[[int, np.ndarray, float, object], None]] = None,
    initial_simplex: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, float, object]:
    """Nelder-Mead minimization (reflection 1, expansion 2, contraction 0.5,
    shrink 0.5); ``fun`` returns (value, payload) and the best of both is
    reported back per iteration.  Terminates early on a flat, collapsed
    simplex."""
    simplex = _initial_simplex(x0) if initial_simplex is None else np.array(initial_simplex, float)
    values: List[Tuple[float, object]] = [fun(v) for v in simplex]

    rho_r, chi, psi, shrink = 1.0, 2.0, 0.5, 0.5
    for it in range(max_iter):
        order = sorted(range(len(simplex)), key=lambda i: values[i][0])
        simplex = simplex[order]
        values = [values[i] for i in order]
        if on_iteration is not None:
            on_iteration(it, simplex[0], values[0][0], values[0][1])
        if (
            abs(values[-1][0] - values[0][0]) < 1e-14
            and np.max(np.abs(simplex[1:] - simplex[0])) < 1e-14
        ):
            break

        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + rho_r * (centroid - simplex[-1])
        fr = fun(xr)
        if fr[0] < values[0][0]:
            xe = centroid + chi * (xr - centroid)
            fe = fun(xe)
            simplex[-1], values[-1] = (xe, fe) if fe[0] < fr[0] else (xr, fr)
        elif fr[0] < values[-2][0]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr[0] < values[-1][0]:
                xc = centroid + psi * (xr - centroid)
            else:
                xc = centroid + psi * (simplex[-1] - centroid)
            fc = fun(xc)
            if fc[0] < min(fr[0], values[-1][0]):
                simplex[-1], values[-1] = xc, fc
            else:
                for i in range(1, len(simplex)):
                    simplex[i] = simplex[0] + shrink * (simplex[i] - simplex[0])
                    values[i] = fun(simplex[i])

    order = sorted(range(len(simplex)), key=lambda i: values[i][0])
    return simplex[order[0]], values[order[0]][0], values[order[0]][1]


def nelder_mead_run(
    problem: ControlProblem,
    backend: BackendSpec,
    max_iter: int,
    initial_amplitudes: Optional[np.ndarray] = None,
    seed: int = 0,
) -> OptimizationRun:
    """Downhill-simplex maximization of J via ``simplex_minimize`` on -J."""
    mask = _active_mask(problem.pulse_template)
    x0 = _pack(
        initial_amplitudes if initial_amplitudes is not None else resonant_guess(problem),
        mask,
    )
    n_evaluations = 0

    def neg_j(x: np.ndarray) -> Tuple[float, EvalResult]:
        nonlocal n_evaluations
        res = evaluate(_unpack(x, mask), problem, backend, seed=_readout_seed(seed, 0, n_evaluations))
        n_evaluations += 1
        return -res.j, res

    history: List[dict] = []

    def record(it: int, x: np.ndarray, _value: float, res: EvalResult) -> None:
        history.append({
            "iteration": it,
            "best_j": res.j,
            "best_population": res.population,
            "best_fluence": res.fluence,
            "best_amplitudes": _unpack(x, mask),
        })

    best_x, _, best_res = simplex_minimize(neg_j, x0, max_iter, on_iteration=record)
    run = OptimizationRun(
        history=history,
        best_amplitudes=_unpack(best_x, mask),
        best_result=best_res,
        backend=backend.describe(),
        seed=seed,
        n_evaluations=n_evaluations,
    )
    if not backend.is_deterministic:
        run.warnings.append("sampled readout makes the simplex ordering noisy")
    return run


def fd_gradient(fun: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    grad = np.empty_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return grad


def quasi_newton_run(
    problem: ControlProblem,
    backend: BackendSpec,
    max_iter: int,
    initial_amplitudes: Optional[np.ndarray] = None,
    fd_step: float = 1e-5,
    seed: int = 0,
) -> OptimizationRun:
    """BFGS ascent on J with central finite-difference gradients."""
    mask = _active_mask(problem.pulse_template)
    x0 = _pack(
        initial_amplitudes if initial_amplitudes is not None else resonant_guess(problem),
        mask,
    )
    n_evaluations = 0

    def full_eval(x: np.ndarray) -> EvalResult:
        nonlocal n_evaluations
        n_evaluations += 1
        return evaluate(_unpack(x, mask), problem, backend, seed=seed)

    def neg_j(x: np.ndarray) -> float:
        return -full_eval(x).j

    def grad(x: np.ndarray) -> np.ndarray:
        return fd_gradient(neg_j, x, h=fd_step)

    history: List[dict] = []

    def record(xk: np.ndarray) -> None:
        res = full_eval(xk)
        history.append({
            "iteration": len(history),
            "best_j": res.j,
            "best_population": res.population,
            "best_fluence": res.fluence,
            "best_amplitudes": _unpack(xk, mask),
        })

    record(x0)
    opt = scipy.optimize.minimize(
        neg_j, x0, jac=grad, method="BFGS",
        callback=record, options={"maxiter": max_iter, "gtol": 1e-10},
    )
    best_res = full_eval(opt.x)
    run = OptimizationRun(
        history=history,
        best_amplitudes=_unpack(opt.x, mask),
        best_result=best_res,
        backend=backend.describe(),
        seed=seed,
        n_evaluations=n_evaluations,
    )
    if not backend.is_deterministic:
        run.warnings.append("finite-difference gradients on a sampled readout are unreliable")
    return run
