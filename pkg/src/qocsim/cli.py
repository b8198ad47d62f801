"""Command-line front end: configure, run and export plot-ready CSV data.

Subcommands: propagate, optimize, noise-study, spectrum, bench, gate-count.
Every CSV starts with a comment line recording the effective-config hash,
the seed and the tool version, so identical invocations are byte-identical.
Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 resource
limit exceeded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import circuit as qc
from .encoding import CircuitVariant, decode_populations, evolution_circuit, trotter_step
from .fixtures import default_harmonics, load_system
from .model import ControlProblem, MolecularSystem, PropagationGrid, PulseParameters
from .optimize import (
    BackendSpec,
    EvaluationError,
    GaConfig,
    evaluate,
    ga_run,
    nelder_mead_run,
    quasi_newton_run,
    resonant_guess,
    table_schedule_3_states,
)
from .reference import (
    PropagationDivergedError,
    max_abs_deviation,
    propagate_euler,
    propagate_exact,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4

DELTA_EPS_THRESHOLD = 0.02

BUNDLED_SYSTEMS = ("cyan3", "cyan11")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


# ---------------------------------------------------------------------------
# Configuration plumbing


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(p) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _config_hash(effective: dict) -> str:
    blob = json.dumps(effective, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _meta_line(cfg_hash: str, seed: int) -> str:
    return f"# config={cfg_hash} seed={seed} version={__version__}"


def _write_csv(path: Path, meta: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(meta + "\n")
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([c if isinstance(c, str) else repr(float(c)) for c in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _resolve_system(name: str) -> MolecularSystem:
    if name in BUNDLED_SYSTEMS:
        return load_system(name)
    path = Path(name)
    if not path.is_file():
        raise ConfigError(f"system {name!r} is neither a bundled fixture nor a file")
    return MolecularSystem.load(path)


def _build_problem(cfg: dict) -> ControlProblem:
    system = _resolve_system(cfg.get("system", "cyan3"))
    duration = float(cfg.get("duration", 250.0))
    dt = float(cfg.get("dt", 1.0))
    m = int(cfg.get("n_harmonics", default_harmonics(system, duration)))
    template = PulseParameters(
        duration=duration,
        n_harmonics=m,
        amplitudes=np.zeros((3, m + 1)),
        include_dc=bool(cfg.get("include_dc", True)),
        amplitude_clamp=cfg.get("amplitude_clamp", 0.005),
    )
    try:
        return ControlProblem(
            system=system,
            target_state_index=int(cfg.get("target", 1)),
            pulse_template=template,
            grid=PropagationGrid.for_duration(duration, dt),
            penalty_weight=float(cfg.get("penalty_weight", 1.0)),
            penalty_mode=cfg.get("penalty_mode", "clamp"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_pulse(cfg: dict, problem: ControlProblem) -> PulseParameters:
    """Build the pulse from the config's ``pulse`` entry.

    Accepted forms: absent/"zero" (zero field), {"file": path},
    {"resonant": true, "amplitude": a}, or {"amplitudes": [[...], ...]}.
    """
    spec = cfg.get("pulse", "zero")
    template = problem.pulse_template
    if spec == "zero" or spec is None:
        return template
    if not isinstance(spec, dict):
        raise ConfigError(f"unsupported pulse spec {spec!r}")
    if "file" in spec:
        path = Path(spec["file"])
        if not path.is_file():
            raise ConfigError(f"pulse file not found: {path}")
        return PulseParameters.load(path)
    if spec.get("resonant"):
        genome = resonant_guess(problem, amplitude=float(spec.get("amplitude", 0.001)))
        return template.with_amplitudes(genome)
    if "amplitudes" in spec:
        return template.with_amplitudes(np.array(spec["amplitudes"], dtype=float))
    raise ConfigError(f"unsupported pulse spec {spec!r}")


def _backend_from_spec(spec: str, args, base: Optional[dict] = None) -> BackendSpec:
    """Backend from a SPEC string plus the noise/variant/readout flags.

    SPEC is ``classical-euler[:dt_fine]``, ``classical-exact`` or ``circuit``;
    ``base`` supplies config-file defaults that the flags override.
    """
    d = dict(base or {})
    if spec.startswith("classical-euler"):
        d["method"] = "classical-euler"
        if ":" in spec:
            d["euler_dt"] = float(spec.split(":", 1)[1])
    else:
        d["method"] = spec
    if args.variant:
        d["variant"] = args.variant
    if args.noise:
        d["noise"] = _parse_noise(args.noise)
    if args.shots is not None:
        d["shots"] = args.shots
    if args.readout:
        d["readout"] = args.readout
    try:
        return BackendSpec.from_dict(d)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad backend spec {spec!r}: {exc}") from exc


def _parse_backend(args, cfg: dict, default: str = "classical-exact") -> BackendSpec:
    base = dict(cfg.get("backend", {}))
    spec = args.backend or base.get("method", default)
    return _backend_from_spec(spec, args, base)


def _parse_noise(name: str) -> qc.NoiseModel:
    if name in qc.NOISE_PRESETS:
        return qc.NOISE_PRESETS[name]
    if name.startswith("custom:"):
        path = Path(name.split(":", 1)[1])
        if not path.is_file():
            raise ConfigError(f"noise file not found: {path}")
        with open(path) as fh:
            try:
                return qc.NoiseModel(**json.load(fh))
            except (TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ConfigError(f"bad noise file {path}: {exc}") from exc
    raise ConfigError(f"unknown noise preset {name!r}")


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _safe_label(spec: str) -> str:
    return spec.replace(":", "_")


# ---------------------------------------------------------------------------
# Shared propagation helpers


def _circuit_population_trace(
    problem: ControlProblem,
    pulse: PulseParameters,
    variant: CircuitVariant,
    noise: Optional[qc.NoiseModel] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Populations (K+1, Q) and leakage (K+1,) at every step boundary."""
    circ = evolution_circuit(problem, pulse, problem.grid, variant)
    boundaries = circ.metadata["step_boundaries"]
    q = problem.system.n_states
    noisy = noise is not None and not noise.is_trivial
    pops = np.empty((len(boundaries), q))
    leaks = np.empty(len(boundaries))
    if noisy:
        state = qc.DensityMatrix.ground(q)
    else:
        state = qc.StateVector.zero(q)
    prev = 0
    for j, bound in enumerate(boundaries):
        segment = qc.Circuit(q, circ.gates[prev:bound])
        if noisy:
            state = qc.apply_density(segment, state, noise)
        else:
            state = qc.apply_statevector(segment, state)
        pops[j], leaks[j] = decode_populations(state, q)
        prev = bound
    return pops, leaks


def _backend_trace(
    problem: ControlProblem, pulse: PulseParameters, backend: BackendSpec
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """(populations on the problem grid, leakage or None) for one backend."""
    if backend.method == "classical-euler":
        traj = propagate_euler(problem, pulse, backend.euler_dt)
        return traj.populations, None
    if backend.method == "classical-exact":
        traj = propagate_exact(problem, pulse)
        return traj.populations, None
    pops, leaks = _circuit_population_trace(problem, pulse, backend.variant, backend.noise)
    return pops, leaks


# ---------------------------------------------------------------------------
# Subcommands


def cmd_propagate(args) -> int:
    cfg = _load_config(args.config)
    problem = _build_problem(cfg)
    pulse = _resolve_pulse(cfg, problem)
    specs = cfg.get("backends")
    if not specs:
        specs = [args.backend or "classical-exact"]
    out = _out_dir(args)
    seed = args.seed
    meta = _meta_line(_config_hash({**cfg, "_cmd": "propagate", "_specs": specs}), seed)

    times = problem.grid.times
    q = problem.system.n_states
    traces: List[Tuple[str, np.ndarray]] = []
    for spec in specs:
        backend = _backend_from_spec(spec, args)
        pops, leaks = _backend_trace(problem, pulse, backend)
        header = ["time"] + [f"pop_{k}" for k in range(q)]
        rows: List[list] = []
        for j, t in enumerate(times):
            row = [t] + list(pops[j])
            if leaks is not None:
                row.append(leaks[j])
            rows.append(row)
        if leaks is not None:
            header.append("leakage")
        _write_csv(out / f"trajectory_{_safe_label(spec)}.csv", meta, header, rows)
        traces.append((spec, pops))

    summary: Dict[str, object] = {
        "backends": list(specs),
        "final_populations": {spec: [float(p) for p in pops[-1]] for spec, pops in traces},
        "seed": seed,
    }
    if len(traces) == 2:
        delta = np.abs(traces[0][1] - traces[1][1]).max(axis=1)
        _write_csv(out / "delta.csv", meta, ["time", "delta_eps"], zip(times, delta))
        summary["max_delta_eps"] = float(delta.max())
        summary["threshold"] = DELTA_EPS_THRESHOLD
        summary["threshold_exceeded"] = bool(delta.max() >= DELTA_EPS_THRESHOLD)
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def _initial_genome(spec, problem: ControlProblem) -> Optional[np.ndarray]:
    if spec is None or spec == "resonant":
        return None  # optimizers default to the resonant guess
    if spec == "zero":
        return np.zeros(problem.pulse_template.amplitudes.shape)
    if isinstance(spec, dict) and "file" in spec:
        return PulseParameters.load(spec["file"]).amplitudes.copy()
    if isinstance(spec, dict) and spec.get("resonant"):
        return resonant_guess(problem, amplitude=float(spec.get("amplitude", 0.01)))
    raise ConfigError(f"unsupported initial-genome spec {spec!r}")


def cmd_optimize(args) -> int:
    cfg = _load_config(args.config)
    problem = _build_problem(cfg)
    backend = _parse_backend(args, cfg)
    opt_cfg = dict(cfg.get("optimizer", {}))
    method = opt_cfg.get("method", "ga")
    seed = args.seed
    out = _out_dir(args)
    meta = _meta_line(_config_hash({**cfg, "_cmd": "optimize"}), seed)

    if method == "ga":
        if "ga" in opt_cfg:
            ga_cfg = GaConfig.from_dict({**opt_cfg["ga"], "seed": seed})
        else:
            ga_cfg = table_schedule_3_states(seed=seed)
        run = ga_run(problem, ga_cfg, backend)
    elif method in ("nelder-mead", "quasi-newton"):
        max_iter = int(opt_cfg.get("max_iter", 100))
        initial = _initial_genome(opt_cfg.get("initial"), problem)
        runner = nelder_mead_run if method == "nelder-mead" else quasi_newton_run
        run = runner(problem, backend, max_iter, initial_amplitudes=initial, seed=seed)
    else:
        raise ConfigError(f"unknown optimizer method {method!r}")

    run.history_to_csv(out / "history.csv", comment=meta.lstrip("# "))
    best_pulse = problem.pulse_template.with_amplitudes(run.best_amplitudes)
    best_pulse.save(out / "best_pulse.json")
    _write_json(out / "history_genomes.json", {
        "duration": problem.pulse_template.duration,
        "n_harmonics": problem.pulse_template.n_harmonics,
        "iterations": [rec["iteration"] for rec in run.history],
        "amplitudes": [np.asarray(rec["best_amplitudes"]).tolist() for rec in run.history],
    })

    summary: Dict[str, object] = {
        "method": method,
        "backend": run.backend,
        "seed": seed,
        "n_evaluations": run.n_evaluations,
        "best_j": run.best_result.j,
        "best_population": run.best_result.population,
        "best_fluence": run.best_result.fluence,
        "warnings": run.warnings,
    }
    if "reevaluate" in cfg:
        re_spec = cfg["reevaluate"]
        re_backend = BackendSpec.from_dict(
            re_spec if isinstance(re_spec, dict) else {"method": re_spec}
        )
        res = evaluate(run.best_amplitudes, problem, re_backend, seed=seed)
        summary["reevaluated_backend"] = re_backend.describe()
        summary["reevaluated_population"] = res.population
        summary["reevaluated_j"] = res.j
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def cmd_noise_study(args) -> int:
    cfg = _load_config(args.config)
    problem = _build_problem(cfg)
    pulse = _resolve_pulse(cfg, problem)
    noise = _parse_noise(args.noise or cfg.get("noise", "mixed"))
    variant = CircuitVariant.from_name(args.variant or cfg.get("variant", "single-occ"))
    sampled = (args.readout or cfg.get("readout", "exact")) == "sampled"
    shots = args.shots if args.shots is not None else int(cfg.get("shots", 2048))
    out = _out_dir(args)
    seed = args.seed
    meta = _meta_line(_config_hash({**cfg, "_cmd": "noise-study"}), seed)

    q = problem.system.n_states
    circ = evolution_circuit(problem, pulse, problem.grid, variant)
    boundaries = circ.metadata["step_boundaries"]
    psi = qc.StateVector.zero(q)
    rho = qc.DensityMatrix.ground(q)
    fid_rows = []
    pop_rows = []
    prev = 0
    for step, bound in enumerate(boundaries):
        segment = qc.Circuit(q, circ.gates[prev:bound])
        psi = qc.apply_statevector(segment, psi)
        rho = qc.apply_density(segment, rho, noise)
        fid = qc.fidelity_to_pure(psi, rho)
        pops, leak = decode_populations(rho, q)
        fid_row = [str(step), fid]
        if sampled:
            # binomial standard error of a fidelity estimated from shots
            fid_row.append(np.sqrt(max(fid * (1.0 - fid), 0.0) / shots))
        fid_rows.append(fid_row)
        pop_rows.append([str(step)] + list(pops) + [leak, rho.purity])
        prev = bound

    fid_header = ["step", "fidelity"] + (["stderr"] if sampled else [])
    _write_csv(out / "fidelity.csv", meta, fid_header, fid_rows)
    _write_csv(
        out / "populations.csv",
        meta,
        ["step"] + [f"pop_{k}" for k in range(q)] + ["leakage", "purity"],
        pop_rows,
    )

    count_rows = []
    kinds = sorted(qc.ONE_QUBIT_KINDS | qc.TWO_QUBIT_KINDS)
    for v in CircuitVariant:
        counts = qc.gate_counts(evolution_circuit(problem, pulse, problem.grid, v))
        count_rows.append(
            [v.value, str(counts["one_qubit"]), str(counts["two_qubit"])]
            + [str(counts.get(k, 0)) for k in kinds]
        )
    _write_csv(
        out / "gate_counts.csv",
        meta,
        ["variant", "one_qubit", "two_qubit"] + [k.lower() for k in kinds],
        count_rows,
    )
    _write_json(out / "summary.json", {
        "variant": variant.value,
        "steps": problem.grid.n_steps,
        "final_fidelity": fid_rows[-1][1],
        "thermal_floor": 1.0 / (1 << q),
        "seed": seed,
    })
    return EXIT_OK


def _spectrum_rows(pulse_like: Tuple[float, np.ndarray]):
    duration, amplitudes = pulse_like
    m = amplitudes.shape[1] - 1
    for j in range(m + 1):
        ax, ay, az = amplitudes[:, j]
        yield [str(j), j * np.pi / duration, ax, ay, az, float(np.sqrt(ax * ax + ay * ay + az * az))]


def cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args)
    seed = args.seed
    meta = _meta_line(_config_hash({**cfg, "_cmd": "spectrum"}), seed)
    header = ["harmonic", "omega", "amp_x", "amp_y", "amp_z", "magnitude"]

    if "history" in cfg:
        path = Path(cfg["history"])
        if not path.is_file():
            raise ConfigError(f"history file not found: {path}")
        with open(path) as fh:
            hist = json.load(fh)
        duration = float(hist["duration"])
        iterations = hist["iterations"]
        genomes = [np.array(a, dtype=float) for a in hist["amplitudes"]]
        rows = []
        for it, genome in zip(iterations, genomes):
            for row in _spectrum_rows((duration, genome)):
                rows.append([str(it)] + row)
        _write_csv(out / "spectrogram.csv", meta, ["iteration"] + header, rows)
        final = (duration, genomes[-1])
    else:
        problem = _build_problem(cfg)
        pulse = _resolve_pulse(cfg, problem)
        final = (pulse.duration, pulse.amplitudes)
    _write_csv(out / "spectrum.csv", meta, header, _spectrum_rows(final))
    return EXIT_OK


def _dense_system(q: int) -> MolecularSystem:
    """All-pairs-coupled synthetic system used for gate-count scaling."""
    energies = np.linspace(0.0, 0.2, q)
    coupling = np.ones((q, q)) - np.eye(q)
    return MolecularSystem(energies=energies, dipole=np.array([coupling] * 3) * 0.1)


def _fit_exponent(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    problem = _build_problem(cfg)
    variant = CircuitVariant.from_name(args.variant or cfg.get("variant", "single-occ"))
    out = _out_dir(args)
    seed = args.seed
    meta = _meta_line(_config_hash({**cfg, "_cmd": "bench"}), seed)

    pulse_cfg = cfg.get("pulse", {"resonant": True, "amplitude": 0.001})
    pulse = _resolve_pulse({"pulse": pulse_cfg}, problem)

    # Trotter error vs step size, against the exact propagator on the same grid
    dt_values = [float(v) for v in cfg.get("dt_values", [0.25, 0.5, 1.0, 2.5, 5.0])]
    err_rows = []
    for dt in dt_values:
        grid = PropagationGrid.for_duration(problem.grid.duration, dt)
        coarse = ControlProblem(
            system=problem.system,
            target_state_index=problem.target_state_index,
            pulse_template=problem.pulse_template,
            grid=grid,
            penalty_weight=problem.penalty_weight,
            penalty_mode=problem.penalty_mode,
        )
        exact = propagate_exact(coarse, pulse)
        pops, _ = _circuit_population_trace(coarse, pulse, variant)
        err_rows.append([dt, float(np.abs(exact.populations - pops).max())])
    _write_csv(out / "trotter_error.csv", meta, ["dt", "max_delta_eps"], err_rows)

    # Two-qubit counts vs number of steps at fixed Q
    k_values = [int(v) for v in cfg.get("k_values", [10, 20, 50, 100, 200])]
    field = np.array([1e-3, 1e-3, 1e-3])
    step = trotter_step(problem.system, field, 1.0, variant)
    per_step = qc.gate_counts(step)["two_qubit"]
    k_rows = [[str(k), str(per_step * k)] for k in k_values]
    _write_csv(out / "counts_vs_k.csv", meta, ["n_steps", "two_qubit"], k_rows)

    # Two-qubit counts vs Q for densely coupled synthetic systems
    q_values = [int(v) for v in cfg.get("q_values", [16, 24, 32, 48, 64])]
    q_rows = []
    for q in q_values:
        counts = qc.gate_counts(trotter_step(_dense_system(q), field, 1.0, variant))
        q_rows.append([str(q), str(counts["two_qubit"])])
    _write_csv(out / "counts_vs_q.csv", meta, ["n_states", "two_qubit"], q_rows)

    _write_json(out / "summary.json", {
        "k_exponent": _fit_exponent(k_values, [int(r[1]) for r in k_rows]),
        "q_exponent": _fit_exponent(q_values, [int(r[1]) for r in q_rows]),
        "dt_values": dt_values,
        "max_delta_eps": {repr(r[0]): r[1] for r in err_rows},
        "seed": seed,
    })
    return EXIT_OK


def cmd_gate_count(args) -> int:
    cfg = _load_config(args.config)
    problem = _build_problem(cfg)
    pulse = _resolve_pulse(cfg, problem)
    out = _out_dir(args)
    meta = _meta_line(_config_hash({**cfg, "_cmd": "gate-count"}), args.seed)

    kinds = sorted(qc.ONE_QUBIT_KINDS | qc.TWO_QUBIT_KINDS)
    rows = []
    for v in CircuitVariant:
        counts = qc.gate_counts(evolution_circuit(problem, pulse, problem.grid, v))
        total = counts["one_qubit"] + counts["two_qubit"]
        rows.append(
            [v.value, str(total), str(counts["one_qubit"]), str(counts["two_qubit"])]
            + [str(counts.get(k, 0)) for k in kinds]
        )
    _write_csv(
        out / "gate_counts.csv",
        meta,
        ["variant", "total", "one_qubit", "two_qubit"] + [k.lower() for k in kinds],
        rows,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qocsim",
        description="Quantum optimal control of few-level molecular systems",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment configuration")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output directory (default: current)")
    common.add_argument(
        "--backend",
        help="classical-euler[:dt_fine], classical-exact or circuit",
    )
    common.add_argument(
        "--variant",
        choices=[v.value for v in CircuitVariant],
        help="circuit synthesis variant",
    )
    common.add_argument(
        "--noise",
        help="none, bf, sq-depol-1, sq-depol-2, mixed or custom:FILE",
    )
    common.add_argument("--shots", type=int, help="shots in sampled readout (default 2048)")
    common.add_argument("--readout", choices=["exact", "sampled"])

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("propagate", parents=[common],
                   help="propagate a pulse and export population traces").set_defaults(fn=cmd_propagate)
    sub.add_parser("optimize", parents=[common],
                   help="run an optimizer and export its history").set_defaults(fn=cmd_optimize)
    sub.add_parser("noise-study", parents=[common],
                   help="fidelity and populations vs propagation steps under noise").set_defaults(fn=cmd_noise_study)
    sub.add_parser("spectrum", parents=[common],
                   help="harmonic spectrum of a pulse or optimization history").set_defaults(fn=cmd_spectrum)
    sub.add_parser("bench", parents=[common],
                   help="Trotter-error and gate-count scaling tables").set_defaults(fn=cmd_bench)
    sub.add_parser("gate-count", parents=[common],
                   help="gate tallies of the evolution circuit per variant").set_defaults(fn=cmd_gate_count)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except qc.ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PropagationDivergedError, EvaluationError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
