"""Command-line surface: run, sweep, analyze.

Exit codes: 0 success, 2 usage or configuration errors, 1 runtime errors.
Diagnostics go to stderr; result summaries to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import io as asio
from .config import (metrics_config_to_dict, model_params_to_dict, parse_config,
                     sweep_config_to_dict)
from .errors import AllianceSimError, ConfigError
from .metrics import (MetricsConfig, classify_phase, detect_episodes,
                      fit_power_law, replacement_lag, summarize_run)
from .runner import run_recorded
from .sweep import SweepConfig, run_sweep

ANALYSIS_NAME = "analysis.json"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alliancesim",
        description="Simulate status-sharing alliance networks and analyze "
                    "their leadership dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one run and emit its data files")
    p_run.add_argument("--config", required=True, help="JSON run config path")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--steps", type=int, default=None, help="override the step count")
    p_run.add_argument("--record-stride", type=int, default=1,
                       help="record every K-th step (default 1)")
    p_run.add_argument("--dump-status-stride", type=int, default=0,
                       help="also write full status snapshots every K steps")

    p_sweep = sub.add_parser("sweep", help="run a parameter grid")
    p_sweep.add_argument("--config", required=True, help="JSON sweep config path")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--workers", type=int, default=1, help="thread count")

    p_an = sub.add_parser("analyze", help="recompute metrics from stored CSVs")
    p_an.add_argument("--in", dest="in_dir", required=True, help="run output directory")
    p_an.add_argument("--fit-range", default=None, metavar="A:B",
                      help="power-law fit bin range, e.g. 1:8")
    return parser


def _read_config(path: str) -> str:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _cmd_run(args) -> int:
    params, cfg = parse_config(_read_config(args.config))
    if isinstance(cfg, SweepConfig):
        raise ConfigError("run expects a run config, got a sweep config "
                          "(it has an 'axes'/'base' key)")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.steps is not None:
        overrides["steps"] = args.steps
    if overrides:
        params = params.with_overrides(**overrides)
    params.validate()
    if args.record_stride < 1:
        raise ConfigError(f"--record-stride must be >= 1, got {args.record_stride}")

    os.makedirs(args.out, exist_ok=True)
    result = run_recorded(params, cfg, record_stride=args.record_stride,
                          status_stride=args.dump_status_stride)
    episodes = detect_episodes(result.records, cfg)

    artifacts = ["timeseries.csv", "episodes.csv", "histogram.csv", "final_state.csv"]
    asio.emit_timeseries(result.records, os.path.join(args.out, "timeseries.csv"))
    asio.emit_episodes(episodes, os.path.join(args.out, "episodes.csv"))
    asio.emit_histogram(result.histogram, os.path.join(args.out, "histogram.csv"))
    asio.emit_final_state(result.final_state, os.path.join(args.out, "final_state.csv"))
    if result.snapshots is not None:
        asio.emit_status_snapshots(result.snapshots,
                                   os.path.join(args.out, "status_snapshots.csv"))
        artifacts.append("status_snapshots.csv")

    asio.write_manifest(args.out, {
        "kind": "run",
        "params": model_params_to_dict(params),
        "metrics": metrics_config_to_dict(cfg),
        "seed": params.seed,
        "record_stride": args.record_stride,
        "histogram_sample_count": result.histogram.sample_count,
        "total_rewires": result.total_rewires,
        "duration_seconds": result.duration_s,
    }, artifacts)

    print(f"run: {params.steps} steps, n={params.n}, lambda={params.lam}, "
          f"q={params.q}, seed={params.seed} -> {args.out} "
          f"({len(episodes)} episodes, {result.total_rewires} rewires, "
          f"{result.duration_s:.1f}s)")
    return 0


def _cmd_sweep(args) -> int:
    base, cfg = parse_config(_read_config(args.config))
    if not isinstance(cfg, SweepConfig):
        raise ConfigError("sweep expects a sweep config with an 'axes' key")
    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    print(f"sweep: {cfg.size()} rows "
          f"({cfg.size() // cfg.replicates} points x {cfg.replicates} replicates), "
          f"{args.workers} worker(s)", file=sys.stderr)

    os.makedirs(args.out, exist_ok=True)
    started = time.perf_counter()
    result = run_sweep(cfg, workers=args.workers)
    duration = time.perf_counter() - started
    asio.emit_sweep(result, os.path.join(args.out, "sweep.csv"))
    asio.write_manifest(args.out, {
        "kind": "sweep",
        "sweep": sweep_config_to_dict(cfg),
        "rows": len(result.rows),
        "duration_seconds": duration,
    }, ["sweep.csv"])
    failed = sum(1 for row in result.rows if row.error)
    print(f"sweep: {len(result.rows)} rows done in {duration:.1f}s "
          f"({failed} failed) -> {args.out}")
    return 0


def _parse_fit_range(text: str) -> tuple[int, int]:
    try:
        lo_s, hi_s = text.split(":", 1)
        return int(lo_s), int(hi_s)
    except ValueError as exc:
        raise ConfigError(f"--fit-range must look like A:B with integers, "
                          f"got {text!r}") from exc


def _cmd_analyze(args) -> int:
    ts_path = os.path.join(args.in_dir, "timeseries.csv")
    if not os.path.exists(ts_path):
        raise ConfigError(f"no timeseries.csv in {args.in_dir}")

    cfg = MetricsConfig()
    manifest_path = os.path.join(args.in_dir, asio.MANIFEST_NAME)
    if os.path.exists(manifest_path):
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if "metrics" in manifest:
            cfg = MetricsConfig(**manifest["metrics"]).validate()

    records = asio.read_timeseries(ts_path)
    summary = summarize_run(records, cfg)
    phase = classify_phase(summary, cfg)
    lags = replacement_lag(records, cfg.threshold, cfg)

    fit_doc = None
    hist_path = os.path.join(args.in_dir, "histogram.csv")
    if os.path.exists(hist_path):
        hist = asio.read_histogram(hist_path)
        fit_args = {}
        if args.fit_range is not None:
            fit_args["x_min"], fit_args["x_max"] = _parse_fit_range(args.fit_range)
        try:
            fit = fit_power_law(hist, **fit_args)
            fit_doc = {"exponent": fit.exponent, "r_squared": fit.r_squared,
                       "intercept": fit.intercept, "x_min": fit.x_min,
                       "x_max": fit.x_max, "n_bins": fit.n_bins}
        except AllianceSimError as exc:
            print(f"power-law fit skipped: {exc}", file=sys.stderr)

    doc = {
        "schema_version": 1,
        "threshold": cfg.threshold,
        "steps_recorded": summary.steps,
        "phase": phase.value,
        "frac_any_leader": summary.frac_any,
        "count_fractions": list(summary.count_fractions),
        "modal_count_window": summary.modal_count_window,
        "new_leader_count": summary.new_leader_count,
        "new_leaders_window": summary.new_leaders_window,
        "distinct_leaders": summary.distinct_leaders,
        "episodes": summary.n_episodes,
        "mean_tenure": summary.mean_tenure,
        "median_tenure": summary.median_tenure,
        "replacement_lag": {
            "count": int(lags.size),
            "mean": float(lags.mean()) if lags.size else None,
            "median": float(np.median(lags)) if lags.size else None,
        },
        "fit": fit_doc,
    }
    out_path = os.path.join(args.in_dir, ANALYSIS_NAME)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    print(f"analyze: phase={phase.value}, episodes={summary.n_episodes}, "
          f"new_leaders={summary.new_leader_count}, "
          f"median_tenure={summary.median_tenure}, -> {out_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_analyze(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AllianceSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
