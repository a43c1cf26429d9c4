"""Single-run and parallel batch execution with per-iteration traces.

A run is a pure function of (config, params, seed): the trace it produces
is bit-identical across repetitions and across worker counts. Batch mode
fans independent runs (seeds base_seed + index) over a process pool and
writes one CSV per run plus a manifest with the per-run summary.

CSV schema: header ``iteration,best_fitness,msd,alpha1,alpha2,omega``, one
record per line, LF endings, ``.`` decimal separator, reals written in
shortest round-trip form.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .adaptive import AdaptiveConfig, initial_metric_trace, step_adaptive
from .analysis import msd_to_centroid
from .core import (
    PsoParams,
    SwarmConfig,
    SwarmState,
    Variant,
    init_swarm,
    make_rng,
    omega_at,
    step_standard,
)
from .eigencritical import step_eigencritical
from .errors import ConfigurationError, EvaluationError, TraceParseError
from .objectives import get_objective

CSV_HEADER = ["iteration", "best_fitness", "msd", "alpha1", "alpha2", "omega"]


@dataclass(frozen=True)
class IterationRecord:
    """Post-step snapshot of iteration t: fitness, swarm size, live parameters."""

    iteration: int
    best_fitness: float
    msd: float
    alpha1: float
    alpha2: float
    omega: float


@dataclass
class RunTrace:
    """Everything one run produced, sufficient to replay or analyze it."""

    config: SwarmConfig
    params_initial: PsoParams
    records: list = field(default_factory=list)
    seed: int = 0
    warnings: list = field(default_factory=list)
    error: Optional[str] = None
    # worst |top eigenvalue modulus - 1| of any committed transform
    # (meaningful for the transform-based variant, 0.0 otherwise)
    max_top_modulus_error: float = 0.0

    @property
    def final_best_fitness(self) -> float:
        return self.records[-1].best_fitness if self.records else float("nan")

    @property
    def final_msd(self) -> float:
        return self.records[-1].msd if self.records else float("nan")


def run_single(
    config: SwarmConfig,
    params: PsoParams,
    adaptive_cfg: Optional[AdaptiveConfig] = None,
    per_iteration: Optional[Callable[[SwarmState], None]] = None,
) -> RunTrace:
    """Execute the configured variant for config.iterations steps.

    Record t reflects the post-step state of iteration t; the recorded
    parameter values are the ones the step actually ran with (scheduled
    inertia included), which for the adaptive variant shows the drift. An
    evaluation error aborts the run, leaving the partial trace plus an
    error record instead of raising.
    """
    if config.variant == Variant.ADAPTIVE:
        if adaptive_cfg is None:
            raise ConfigurationError("adaptive variant requires an AdaptiveConfig")
    elif adaptive_cfg is not None:
        raise ConfigurationError(
            f"adaptive settings are only valid for the adaptive variant, "
            f"not {config.variant.value}"
        )
    objective = get_objective(config.objective)
    rng = make_rng(config)
    state = init_swarm(config, params, rng)
    trace = RunTrace(config=config, params_initial=params, seed=config.seed)
    metric_trace = (
        initial_metric_trace(state, config, adaptive_cfg)
        if config.variant == Variant.ADAPTIVE
        else None
    )
    live_params = params
    for _ in range(config.iterations):
        step_params = live_params
        effective_omega = omega_at(state.iteration, config, step_params)
        try:
            if config.variant == Variant.STANDARD:
                state = step_standard(state, step_params, config, objective, rng)
            elif config.variant == Variant.EIGENCRITICAL:
                state = step_eigencritical(state, step_params, config, objective, rng)
            else:
                state, live_params, metric_trace = step_adaptive(
                    state, step_params, config, adaptive_cfg, objective, rng, metric_trace
                )
        except EvaluationError as exc:
            trace.error = str(exc)
            trace.warnings.append(f"run aborted: {exc}")
            break
        if state.warnings:
            trace.warnings.extend(state.warnings)
            state.warnings.clear()
        trace.records.append(
            IterationRecord(
                iteration=state.iteration,
                best_fitness=state.global_best_fitness,
                msd=msd_to_centroid(state),
                alpha1=step_params.alpha1,
                alpha2=step_params.alpha2,
                omega=effective_omega,
            )
        )
        if per_iteration is not None:
            per_iteration(state)
    trace.max_top_modulus_error = state.top_modulus_error_max
    return trace


def write_csv(trace: RunTrace, fh) -> None:
    """Emit the trace records in the published CSV schema to a text stream."""
    fh.write(",".join(CSV_HEADER) + "\n")
    for r in trace.records:
        fh.write(
            f"{r.iteration},{r.best_fitness!r},{r.msd!r},"
            f"{r.alpha1!r},{r.alpha2!r},{r.omega!r}\n"
        )


def dump_csv(trace: RunTrace, path) -> None:
    """Write the trace records in the published CSV schema."""
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            write_csv(trace, fh)
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc


def load_csv(path) -> list:
    """Parse a trace CSV back into IterationRecords; strict about the schema."""
    path = Path(path)
    records = []
    with open(path, "r", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != CSV_HEADER:
            raise TraceParseError(path, 1, f"unexpected header {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(CSV_HEADER):
                raise TraceParseError(
                    path, line_no, f"expected {len(CSV_HEADER)} fields, got {len(parts)}"
                )
            try:
                records.append(
                    IterationRecord(
                        iteration=int(parts[0]),
                        best_fitness=float(parts[1]),
                        msd=float(parts[2]),
                        alpha1=float(parts[3]),
                        alpha2=float(parts[4]),
                        omega=float(parts[5]),
                    )
                )
            except ValueError as exc:
                raise TraceParseError(path, line_no, str(exc)) from exc
    return records


def batch_filename(index: int, n_runs: int) -> str:
    """swarm_NNN.csv, zero-padded to 3 digits, widening when runs exceed 1000."""
    width = max(3, len(str(n_runs - 1)))
    return f"swarm_{index:0{width}d}.csv"


def _run_batch_worker(args) -> tuple:
    config, params, adaptive_cfg, out_path = args
    trace = run_single(config, params, adaptive_cfg)
    dump_csv(trace, out_path)
    return (
        config.seed,
        trace.final_best_fitness,
        len(trace.records),
        trace.error,
        len(trace.warnings),
        trace.max_top_modulus_error,
    )


@dataclass(frozen=True)
class BatchResult:
    trace_paths: list
    manifest_path: Path
    final_fitness: np.ndarray
    seeds: list
    errors: list
    warning_counts: list
    max_top_modulus_errors: np.ndarray


def run_batch(
    config: SwarmConfig,
    params: PsoParams,
    adaptive_cfg: Optional[AdaptiveConfig] = None,
    n_runs: int = 1,
    out_dir="./",
    n_workers: int = 0,
) -> BatchResult:
    """Run n_runs independent seeded runs on up to n_workers processes.

    Seeds are base seed + run index, so the output byte content depends
    only on (config, params, base seed, n_runs), never on the worker count
    or scheduling. n_workers=0 auto-detects hardware parallelism. A
    manifest.csv summarizing config, per-run seed and final fitness is
    written next to the traces.
    """
    if n_runs < 1:
        raise ConfigurationError(f"n_runs must be >= 1, got {n_runs}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise OSError(f"output directory {out_dir} is not writable")
    if n_workers == 0:
        n_workers = os.cpu_count() or 1
    tasks = []
    paths = []
    for i in range(n_runs):
        run_config = replace(config, seed=config.seed + i)
        path = out_dir / batch_filename(i, n_runs)
        paths.append(path)
        tasks.append((run_config, params, adaptive_cfg, path))
    if n_workers == 1:
        results = [_run_batch_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_run_batch_worker, tasks))
    seeds = [r[0] for r in results]
    finals = np.array([r[1] for r in results])
    errors = [r[3] for r in results]
    warning_counts = [r[4] for r in results]
    modulus_errors = np.array([r[5] for r in results])
    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "run", "filename", "seed", "final_best_fitness", "records",
                "error", "warnings", "max_top_modulus_error",
                "n_particles", "dims", "iterations", "boundary_radius",
                "objective", "variant", "alpha1", "alpha2", "omega",
                "inertia_schedule", "epsilon", "metric", "rule",
            ]
        )
        for i, (seed, final, n_records, error, n_warn, mod_err) in enumerate(results):
            writer.writerow(
                [
                    i, paths[i].name, seed, repr(float(final)), n_records,
                    error or "", n_warn, repr(float(mod_err)),
                    config.n_particles, config.dims,
                    config.iterations, repr(config.boundary_radius),
                    config.objective.value, config.variant.value,
                    repr(params.alpha1), repr(params.alpha2), repr(params.omega),
                    params.inertia_schedule.value,
                    "" if adaptive_cfg is None else repr(adaptive_cfg.epsilon),
                    "" if adaptive_cfg is None else adaptive_cfg.metric.value,
                    "" if adaptive_cfg is None else adaptive_cfg.rule.value,
                ]
            )
    return BatchResult(
        trace_paths=paths,
        manifest_path=manifest_path,
        final_fitness=finals,
        seeds=seeds,
        errors=errors,
        warning_counts=warning_counts,
        max_top_modulus_errors=modulus_errors,
    )
