"""Seeded parameter grids with independent replicates.

A sweep expands to one row per (parameter point, replicate) in a fixed
deterministic order; each row's seed depends only on the master seed and
the row index, so results are identical for any worker count.  Rows run in
threads: the compiled simulation loop releases the GIL, so independent rows
execute in parallel with no shared mutable state.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigError, InsufficientDataError, InvalidParamsError
from .metrics import (MetricsConfig, PhaseLabel, classify_phase, fit_power_law,
                      summarize_run)
from .model import ModelParams
from .rng import splitmix64
from .runner import run_recorded

# Sweepable parameter names with (integral, low, high) ranges; high=None is
# unbounded.  Cross-field rules (lambda <= n-1) are checked per row at run
# time so one bad point cannot abort a whole sweep.
AXIS_RANGES = {
    "n": (True, 2, None),
    "lam": (True, 1, None),
    "r": (False, 0.0, 1.0),
    "q": (False, 0.0, 1.0),
    "w": (False, 0.0, 1.0),
    "steps": (True, 0, None),
}


@dataclass(frozen=True)
class SweepConfig:
    """A base parameter set, the axes to vary, and replication settings."""

    base: ModelParams = ModelParams()
    axes: tuple[tuple[str, tuple], ...] = ()
    replicates: int = 1
    master_seed: int = 0
    metrics: MetricsConfig = field(default_factory=MetricsConfig)

    def validate(self) -> "SweepConfig":
        self.base.validate()
        self.metrics.validate()
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError(f"replicates: must be an integer >= 1, got {self.replicates!r}")
        if not isinstance(self.master_seed, int) or not (0 <= self.master_seed < 2 ** 64):
            raise ConfigError(f"master_seed: must be a 64-bit unsigned integer, "
                              f"got {self.master_seed!r}")
        for pos, (name, values) in enumerate(self.axes):
            if name not in AXIS_RANGES:
                raise ConfigError(f"axes[{pos}]: unknown parameter {name!r}; "
                                  f"sweepable: {sorted(AXIS_RANGES)}")
            if len(values) == 0:
                raise ConfigError(f"axes[{pos}] ({name}): empty value list")
            integral, lo, hi = AXIS_RANGES[name]
            for vpos, value in enumerate(values):
                if integral and not isinstance(value, int):
                    raise ConfigError(
                        f"axes[{pos}] ({name}) value {value!r} at index {vpos}: "
                        f"must be an integer")
                if value < lo or (hi is not None and value > hi):
                    top = hi if hi is not None else "inf"
                    raise ConfigError(
                        f"axes[{pos}] ({name}) value {value!r} at index {vpos}: "
                        f"out of range [{lo}, {top}]")
        return self

    def size(self) -> int:
        points = math.prod(len(values) for _, values in self.axes)
        return points * self.replicates


def expand_grid(config: SweepConfig) -> list[tuple[ModelParams, int]]:
    """All (resolved params, run seed) rows in deterministic order.

    Axes vary in declared order with the replicate index innermost;
    run_seed = splitmix64(master_seed XOR row_index).
    """
    config.validate()
    names = [name for name, _ in config.axes]
    value_lists = [values for _, values in config.axes]
    rows = []
    index = 0
    for combo in itertools.product(*value_lists):
        overrides = dict(zip(names, combo))
        for _ in range(config.replicates):
            seed = splitmix64(config.master_seed ^ index)
            params = config.base.with_overrides(**overrides, seed=seed)
            rows.append((params, seed))
            index += 1
    return rows


@dataclass(frozen=True)
class SweepRow:
    """Summary of one run, or its error; index matches expand_grid order."""

    index: int
    params: ModelParams
    run_seed: int
    error: str = ""
    new_leader_count: int = 0
    mean_tenure: float = float("nan")
    median_tenure: float = float("nan")
    frac_count_0: float = float("nan")
    frac_count_1: float = float("nan")
    frac_count_2: float = float("nan")
    frac_count_3plus: float = float("nan")
    exponent: float | None = None
    fit_r_squared: float | None = None
    phase: PhaseLabel | None = None


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list[SweepRow]


def _run_row(index: int, params: ModelParams, seed: int,
             metrics: MetricsConfig) -> SweepRow:
    try:
        params.validate()
        result = run_recorded(params, metrics)
        summary = summarize_run(result.records, metrics)
        try:
            fit = fit_power_law(result.histogram)
            exponent, r_squared = fit.exponent, fit.r_squared
        except InsufficientDataError:
            exponent, r_squared = None, None
        return SweepRow(
            index=index, params=params, run_seed=seed,
            new_leader_count=summary.new_leader_count,
            mean_tenure=summary.mean_tenure,
            median_tenure=summary.median_tenure,
            frac_count_0=summary.count_fractions[0],
            frac_count_1=summary.count_fractions[1],
            frac_count_2=summary.count_fractions[2],
            frac_count_3plus=summary.count_fractions[3],
            exponent=exponent, fit_r_squared=r_squared,
            phase=classify_phase(summary, metrics),
        )
    except Exception as exc:  # per-row failures are data, not crashes
        return SweepRow(index=index, params=params, run_seed=seed,
                        error=f"{type(exc).__name__}: {exc}")


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Execute every grid row; results do not depend on the worker count."""
    config.validate()
    if workers < 1:
        raise InvalidParamsError(f"workers must be >= 1, got {workers!r}")
    grid = expand_grid(config)
    rows: list[SweepRow | None] = [None] * len(grid)
    if workers == 1:
        for index, (params, seed) in enumerate(grid):
            rows[index] = _run_row(index, params, seed, config.metrics)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_row, index, params, seed, config.metrics): index
                for index, (params, seed) in enumerate(grid)
            }
            for future, index in futures.items():
                rows[index] = future.result()
    return SweepResult(config=config, rows=rows)
