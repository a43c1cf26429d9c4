"""Command-line front door: run, batch, analyze, serve.

Exit codes: 0 success, 1 usage error, 2 runtime or I/O failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .adaptive import AdaptiveConfig, MetricId, RuleId
from .analysis import (
    DEFAULT_BIN_SIZE,
    DEFAULT_RANGE,
    build_histogram,
    fit_exponential,
    fit_power_law,
    positive_increments,
)
from .core import InertiaSchedule, PsoParams, SwarmConfig, Variant
from .errors import ConfigurationError, DegenerateDataError, PsoLabError
from .objectives import ObjectiveId
from .runner import dump_csv, load_csv, run_batch, run_single, write_csv
from .service import DEFAULT_SAMPLE_INTERVAL, serve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_swarm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON file of flag defaults (same names, dashes as "
                        "underscores); explicit flags win")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="standard")
    p.add_argument("--objective", choices=[o.value for o in ObjectiveId], default="sphere")
    p.add_argument("--particles", type=int, default=20, help="swarm size N")
    p.add_argument("--dims", type=int, default=20, help="problem dimensionality D")
    p.add_argument("--iters", type=int, default=1000, help="iteration budget I")
    p.add_argument("--boundary", type=float, default=500.0,
                   help="radius of the initial-placement hypersphere B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha1", type=float, default=1.494)
    p.add_argument("--alpha2", type=float, default=1.494)
    p.add_argument("--omega", type=float, default=0.729)
    p.add_argument("--omega-top", type=float, default=0.8)
    p.add_argument("--omega-bottom", type=float, default=0.4)
    p.add_argument("--inertia", choices=[s.value for s in InertiaSchedule],
                   default="constant", help="inertia schedule")
    p.add_argument("--epsilon", type=float, default=None, help="adaptive step size")
    p.add_argument("--metric", choices=[m.value for m in MetricId], default=None)
    p.add_argument("--rule", choices=[r.value for r in RuleId], default=None)


def _apply_config_file(args, parser, argv) -> None:
    """Overlay JSON config-file values under explicitly passed flags."""
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config {args.config}: {exc}")
    if not isinstance(values, dict):
        parser.error(f"--config {args.config} must hold a JSON object")
    passed = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in values.items():
        name = key.replace("-", "_")
        if not hasattr(args, name):
            parser.error(f"unknown config key {key!r} in {args.config}")
        if name not in passed:
            setattr(args, name, value)


def _build_setup(args, parser):
    adaptive_flags = {
        "--epsilon": args.epsilon, "--metric": args.metric, "--rule": args.rule,
    }
    given = [k for k, v in adaptive_flags.items() if v is not None]
    if args.variant != "adaptive" and given:
        parser.error(f"{', '.join(given)} only valid with --variant adaptive")
    adaptive_cfg = None
    if args.variant == "adaptive":
        if args.epsilon is None:
            print("warning: --epsilon not given, using default 0.1", file=sys.stderr)
        adaptive_cfg = AdaptiveConfig(
            epsilon=args.epsilon if args.epsilon is not None else 0.1,
            metric=args.metric or MetricId.VEL_NORM,
            rule=args.rule or RuleId.DEPENDANT,
        )
    config = SwarmConfig(
        n_particles=args.particles,
        dims=args.dims,
        iterations=args.iters,
        boundary_radius=args.boundary,
        objective=args.objective,
        variant=args.variant,
        seed=args.seed,
    )
    params = PsoParams(
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        omega=args.omega,
        omega_top=args.omega_top,
        omega_bottom=args.omega_bottom,
        inertia_schedule=args.inertia,
    ).validate_ui_bounds()
    return config, params, adaptive_cfg


def cmd_run(args, parser) -> int:
    config, params, adaptive_cfg = _build_setup(args, parser)
    trace = run_single(config, params, adaptive_cfg)
    info = sys.stderr if args.out is None else sys.stdout
    if args.out is None:
        write_csv(trace, sys.stdout)
    else:
        dump_csv(trace, args.out)
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    msds = [r.msd for r in trace.records if np.isfinite(r.msd)]
    print(f"final_best_fitness: {trace.final_best_fitness!r}", file=info)
    if msds:
        print(
            f"msd: final={trace.final_msd!r} mean={float(np.mean(msds))!r} "
            f"max={float(np.max(msds))!r}",
            file=info,
        )
    return EXIT_RUNTIME if trace.error else EXIT_OK


def cmd_batch(args, parser) -> int:
    config, params, adaptive_cfg = _build_setup(args, parser)
    result = run_batch(
        config, params, adaptive_cfg,
        n_runs=args.runs, out_dir=args.out_dir, n_workers=args.workers,
    )
    finals = result.final_fitness[np.isfinite(result.final_fitness)]
    print(f"runs: {args.runs}")
    print(f"traces: {result.trace_paths[0].parent}")
    if finals.size:
        print(f"final_fitness_mean: {float(np.mean(finals))!r}")
        print(f"final_fitness_std: {float(np.std(finals))!r}")
    failed = [e for e in result.errors if e]
    if failed:
        print(f"aborted_runs: {len(failed)}", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args, parser) -> int:
    all_records = [load_csv(path) for path in args.traces]
    n_iters = min(len(r) for r in all_records)
    report: dict = {"traces": len(all_records), "iterations": n_iters}
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    if n_iters:
        fitness = np.array([[r[i].best_fitness for i in range(n_iters)] for r in all_records])
        msd = np.array([[r[i].msd for i in range(n_iters)] for r in all_records])
        mean_fitness = fitness.mean(axis=0)
        mean_msd = msd.mean(axis=0)
        report["mean_final_fitness"] = float(mean_fitness[-1])
        report["std_final_fitness"] = float(fitness[:, -1].std())
        if out_dir:
            _write_curve(out_dir / "mean_fitness.csv", "mean_best_fitness", mean_fitness)
            _write_curve(out_dir / "mean_msd.csv", "mean_msd", mean_msd)

    increments = np.concatenate(
        [positive_increments([rec.msd for rec in records]) for records in all_records]
    ) if n_iters >= 2 else np.empty(0)
    if increments.size == 0:
        report["histogram"] = None
        report["power_law"] = None
        print("no positive increments in the supplied traces", file=sys.stderr)
        print(json.dumps(report, indent=2))
        if out_dir:
            (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        return EXIT_OK

    lo, hi = args.range
    hist = build_histogram(increments, bin_size=args.bin_size, range_min=lo, range_max=hi)
    report["histogram"] = {
        "bin_size": hist.bin_size, "range": [hist.range_min, hist.range_max],
        "total_in_range": int(hist.counts.sum()), "n_bins": hist.n_bins,
    }
    try:
        fit = fit_power_law(increments)
        exp_fit = fit_exponential(increments)
        report["power_law"] = {
            "alpha_hat": fit.alpha_hat,
            "xmin_hat": fit.xmin_hat,
            "n_tail": fit.n_tail,
            "ks": fit.ks,
            "low_confidence": fit.low_confidence,
            "ks_exponential": exp_fit.ks,
            "preferred_over_exponential": fit.ks < exp_fit.ks,
        }
    except DegenerateDataError as exc:
        fit = None
        report["power_law"] = {"error": str(exc)}

    if out_dir:
        with open(out_dir / "histogram.csv", "w", newline="\n") as fh:
            fh.write("bin_lo,bin_hi,count,normalized\n")
            edges = hist.bin_edges
            for i in range(hist.n_bins):
                fh.write(
                    f"{edges[i]!r},{edges[i+1]!r},{int(hist.counts[i])},"
                    f"{float(hist.normalized[i])!r}\n"
                )
        (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        if not args.no_figures:
            from . import plotting

            xs = np.arange(1, n_iters + 1)
            plotting.plot_curve(xs, mean_fitness, "mean best fitness",
                                out_dir / "mean_fitness.png")
            plotting.plot_curve(xs, mean_msd, "mean MSD",
                                out_dir / "mean_msd.png", log_y=args.log_log)
            plotting.plot_histogram(hist, out_dir / "histogram.png",
                                    log_log=args.log_log, fit=fit)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _write_curve(path: Path, name: str, values) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"iteration,{name}\n")
        for i, v in enumerate(values, start=1):
            fh.write(f"{i},{float(v)!r}\n")


def cmd_serve(args, parser) -> int:
    serve(args.bind, sample_interval=args.sample_interval_ms / 1000.0,
          websocket=args.ws)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="psolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single run, trace to CSV")
    _add_swarm_flags(p_run)
    p_run.add_argument("--out", default=None, help="trace CSV path (default: stdout)")

    p_batch = sub.add_parser("batch", help="parallel seeded runs with manifest")
    _add_swarm_flags(p_batch)
    p_batch.add_argument("--runs", type=int, default=1)
    p_batch.add_argument("--out-dir", default="./")
    p_batch.add_argument("--workers", type=int, default=0,
                         help="0 = all hardware threads")

    p_an = sub.add_parser("analyze", help="curves, histogram and power-law fit from traces")
    p_an.add_argument("traces", nargs="+", help="trace CSV files")
    p_an.add_argument("--out-dir", default=None,
                      help="where to write curves/histogram/report and figures")
    p_an.add_argument("--bin-size", type=float, default=DEFAULT_BIN_SIZE)
    p_an.add_argument("--range", type=float, nargs=2, default=list(DEFAULT_RANGE),
                      metavar=("MIN", "MAX"))
    p_an.add_argument("--log-log", action="store_true",
                      help="log-log histogram figure, log-y MSD figure")
    p_an.add_argument("--no-figures", action="store_true",
                      help="skip PNG rendering, keep delimited outputs")

    p_serve = sub.add_parser("serve", help="live-control service")
    p_serve.add_argument("--bind", default="127.0.0.1:7878", help="host:port")
    p_serve.add_argument("--sample-interval-ms", type=float, default=DEFAULT_SAMPLE_INTERVAL * 1000)
    p_serve.add_argument("--ws", action="store_true",
                         help="speak the protocol over WebSocket instead of TCP")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if hasattr(args, "config"):
            _apply_config_file(args, parser, argv if argv is not None else sys.argv[1:])
        handler = {
            "run": cmd_run,
            "batch": cmd_batch,
            "analyze": cmd_analyze,
            "serve": cmd_serve,
        }[args.command]
        return handler(args, parser)
    except SystemExit as exc:
        # argparse help/usage paths; normalize to a return code
        return int(exc.code or 0)
    except ConfigurationError as exc:
        # bad values arriving through flags are usage errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream consumer (head, less) closed the pipe; die quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except (PsoLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
