"""Observables over simulation trajectories.

Leadership is defined by rank (the individual with maximal status) and by
level (status above a threshold, 3.0 by default).  Episodes, turnover
counts, replacement lags, degree histograms, power-law fits, and the
five-phase classification are all computed from recorded per-step data, so
they can be recomputed from stored CSVs without re-simulating.

A per-individual status is only observable in a step record while that
individual is the leader, so episode intervals are clipped to leadership
runs; see :func:`detect_episodes`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InsufficientDataError, InvalidParamsError
from .model import NetworkState


@dataclass(frozen=True)
class MetricsConfig:
    """Thresholds and windows for leadership metrics.

    ``threshold`` is the status level above which an individual counts as a
    leader; ``leader_memory`` is the recency window for counting new leaders
    (an incoming leader is new when absent from the previous distinct
    leaders within the window).  ``p_lead`` and ``stability_window`` are the
    phase-classification knobs: minimum fraction of steps with any leader,
    and the trailing fraction of the run examined for leader turnover.
    """

    threshold: float = 3.0
    leader_memory: int = 2
    episode_min_steps: int = 0
    histogram_sample_period: int = 1
    p_lead: float = 0.5
    stability_window: float = 0.8

    def validate(self) -> "MetricsConfig":
        if not self.threshold > 1.0:
            raise InvalidParamsError(
                f"threshold must exceed the uniform status 1.0, got {self.threshold!r}")
        if not isinstance(self.leader_memory, int) or self.leader_memory < 1:
            raise InvalidParamsError(
                f"leader_memory must be an integer >= 1, got {self.leader_memory!r}")
        if not isinstance(self.episode_min_steps, int) or self.episode_min_steps < 0:
            raise InvalidParamsError(
                f"episode_min_steps must be a non-negative integer, got {self.episode_min_steps!r}")
        if not isinstance(self.histogram_sample_period, int) or self.histogram_sample_period < 1:
            raise InvalidParamsError(
                f"histogram_sample_period must be an integer >= 1, "
                f"got {self.histogram_sample_period!r}")
        if not (0.0 < self.p_lead <= 1.0):
            raise InvalidParamsError(f"p_lead must lie in (0, 1], got {self.p_lead!r}")
        if not (0.0 < self.stability_window <= 1.0):
            raise InvalidParamsError(
                f"stability_window must lie in (0, 1], got {self.stability_window!r}")
        return self


@dataclass(frozen=True)
class StepRecord:
    """One timestep's observables."""

    step: int
    leader: int
    leader_status: float
    count_above: int
    total_status: float


@dataclass
class StepRecords:
    """Column-oriented per-step records, ordered by step."""

    step: np.ndarray
    leader: np.ndarray
    leader_status: np.ndarray
    count_above: np.ndarray
    total_status: np.ndarray

    def __len__(self) -> int:
        return self.step.shape[0]

    def row(self, k: int) -> StepRecord:
        return StepRecord(int(self.step[k]), int(self.leader[k]),
                          float(self.leader_status[k]), int(self.count_above[k]),
                          float(self.total_status[k]))

    @classmethod
    def from_rows(cls, rows: Sequence[StepRecord]) -> "StepRecords":
        return cls(
            step=np.array([r.step for r in rows], dtype=np.int64),
            leader=np.array([r.leader for r in rows], dtype=np.int64),
            leader_status=np.array([r.leader_status for r in rows], dtype=np.float64),
            count_above=np.array([r.count_above for r in rows], dtype=np.int64),
            total_status=np.array([r.total_status for r in rows], dtype=np.float64),
        )

    @classmethod
    def empty(cls) -> "StepRecords":
        return cls.from_rows([])


@dataclass(frozen=True)
class LeaderEpisode:
    """One tenure: an individual holding top rank while above the threshold.

    ``above_to`` is exclusive: the first recorded step at which the
    individual is observed at or below the threshold (or no longer leading),
    or one past the final record if the episode was still open there.
    """

    individual: int
    rise_step: int
    above_from: int
    above_to: int

    @property
    def tenure_above(self) -> int:
        return self.above_to - max(self.rise_step, self.above_from)


@dataclass
class DegreeHistogram:
    """Frequencies of incoming-link counts accumulated over sampled steps.

    ``counts[x]`` is the number of (individual, sample) pairs with in-degree
    exactly x.
    """

    counts: np.ndarray
    sample_count: int

    def nonzero_items(self) -> list[tuple[int, int]]:
        xs = np.flatnonzero(self.counts)
        return [(int(x), int(self.counts[x])) for x in xs]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


class PhaseLabel(enum.Enum):
    NO_LEADER = "no_leader"
    TRANSIENT_SINGLE = "transient_single"
    STABLE_SINGLE = "stable_single"
    TRANSIENT_DOUBLE = "transient_double"
    STABLE_DOUBLE = "stable_double"


class PowerLawFit(NamedTuple):
    exponent: float
    r_squared: float
    intercept: float  # fitted log-frequency at log x = 0
    x_min: int
    x_max: int
    n_bins: int


def leader_of(state: NetworkState) -> tuple[int, float]:
    """Arg-max of statuses; ties broken by lowest id."""
    idx = int(np.argmax(state.statuses))
    return idx, float(state.statuses[idx])


def count_above(state: NetworkState, threshold: float) -> int:
    """Number of individuals strictly above the threshold."""
    return int(np.count_nonzero(state.statuses > threshold))


def detect_episodes(records: StepRecords, cfg: MetricsConfig | None = None) -> list[LeaderEpisode]:
    """Segment the records into leader episodes.

    An episode is a maximal run of consecutive records over which the same
    individual is the leader with status strictly above the threshold.  A
    leadership change while still above the threshold closes the episode at
    the change (the departed individual's status is no longer observable in
    the records).  Runs shorter than ``episode_min_steps`` are dropped.
    """
    cfg = (cfg or MetricsConfig()).validate()
    m = len(records)
    if m == 0:
        return []
    above = records.leader_status > cfg.threshold
    boundary = np.empty(m, dtype=bool)
    boundary[0] = True
    boundary[1:] = (records.leader[1:] != records.leader[:-1]) | (above[1:] != above[:-1])
    seg_start = np.flatnonzero(boundary)
    seg_end = np.append(seg_start[1:], m)  # exclusive record indices
    episodes = []
    for a, b in zip(seg_start, seg_end):
        if not above[a]:
            continue
        above_from = int(records.step[a])
        above_to = int(records.step[b]) if b < m else int(records.step[m - 1]) + 1
        if above_to - above_from < cfg.episode_min_steps:
            continue
        episodes.append(LeaderEpisode(
            individual=int(records.leader[a]),
            rise_step=above_from,
            above_from=above_from,
            above_to=above_to,
        ))
    return episodes


def _deduped(sequence: np.ndarray) -> np.ndarray:
    if sequence.shape[0] == 0:
        return sequence
    keep = np.empty(sequence.shape[0], dtype=bool)
    keep[0] = True
    keep[1:] = sequence[1:] != sequence[:-1]
    return sequence[keep]


def new_leader_count(leader_sequence, leader_memory: int = 2) -> int:
    """Count leaders that were not among the recent distinct leaders.

    Consecutive repeats are collapsed first.  An incoming leader is new when
    absent from the ``leader_memory`` most recent distinct leaders, i.e. the
    previous ``leader_memory - 1`` distinct leaders other than the one being
    replaced.  The first leader always counts.
    """
    if leader_memory < 1:
        raise InvalidParamsError(f"leader_memory must be >= 1, got {leader_memory!r}")
    changes = _deduped(np.asarray(leader_sequence))
    count = 0
    recent: list = []  # distinct past leaders, most recent first
    for x in changes.tolist():
        if x not in recent[:leader_memory]:
            count += 1
        if x in recent:
            recent.remove(x)
        recent.insert(0, x)
    return count


def degree_histogram(states: Iterable[NetworkState]) -> DegreeHistogram:
    """Accumulate per-individual in-degree counts over the given states."""
    counts = None
    samples = 0
    for state in states:
        indeg = np.bincount(state.out_links.ravel(), minlength=state.n)
        if counts is None:
            counts = np.zeros(state.n, dtype=np.int64)
        counts += np.bincount(indeg, minlength=state.n)[:state.n]
        samples += 1
    if counts is None:
        raise InsufficientDataError("degree_histogram needs at least one sampled state")
    return DegreeHistogram(counts=counts, sample_count=samples)


FIT_NOISE_FLOOR = 100  # bins below this count carry >10% log-frequency error


def default_fit_range(hist: DegreeHistogram, x_min: int | None = None,
                      noise_floor: int = FIT_NOISE_FLOOR) -> tuple[int, int]:
    """Default power-law fit range for the decaying part of the distribution.

    Starts at the histogram mode (the power law is the decay from the peak)
    and ends at the last non-empty bin before the first gap of three or more
    consecutive empty bins (which separates the bulk from the leader hump),
    additionally cut at the last bin with at least ``noise_floor`` counts so
    Poisson-starved truncation bins do not distort the slope.  The floor cut
    is skipped when no bin reaches it.
    """
    counts = hist.counts
    if not counts.any():
        return (x_min or 1), 0
    if x_min is None:
        x_min = max(int(np.argmax(counts)), 1)
    top = int(np.flatnonzero(counts).max())
    x_max = top
    gap = 0
    for x in range(x_min, top + 1):
        if counts[x] == 0:
            gap += 1
            if gap == 3:
                before = np.flatnonzero(counts[x_min:x - 2])
                if before.size:
                    x_max = x_min + int(before.max())
                    break
        else:
            gap = 0
    solid = np.flatnonzero(counts >= noise_floor)
    solid = solid[solid >= x_min]
    if solid.size:
        x_max = min(x_max, int(solid.max()))
    return x_min, x_max


def fit_power_law(hist: DegreeHistogram, x_min: int | None = None,
                  x_max: int | None = None) -> PowerLawFit:
    """Least-squares fit of log frequency against log in-degree.

    Uses the non-empty bins in [x_min, x_max]; the defaults come from
    :func:`default_fit_range`.  Raises InsufficientDataError with fewer than
    three usable bins.
    """
    if x_max is None:
        lo, hi = default_fit_range(hist, None if x_min is None else max(int(x_min), 1))
    else:
        lo = 1 if x_min is None else max(int(x_min), 1)
        hi = int(x_max)
    hi = min(hi, hist.counts.shape[0] - 1)
    xs = np.arange(lo, hi + 1)
    xs = xs[hist.counts[lo:hi + 1] > 0] if xs.size else xs
    if xs.size < 3:
        raise InsufficientDataError(
            f"power-law fit needs >= 3 non-empty bins in [{lo}, {hi}], found {xs.size}")
    log_x = np.log(xs.astype(np.float64))
    log_f = np.log(hist.counts[xs].astype(np.float64))
    slope, intercept = np.polyfit(log_x, log_f, 1)
    predicted = slope * log_x + intercept
    ss_res = float(np.sum((log_f - predicted) ** 2))
    ss_tot = float(np.sum((log_f - log_f.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-12 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return PowerLawFit(float(slope), r_squared, float(intercept),
                       int(lo), int(hi), int(xs.size))


@dataclass(frozen=True)
class RunSummary:
    """Aggregates used for phase classification and sweep rows.

    Leader-change statistics are computed over the threshold-gated leader
    sequence (steps on which at least one individual is above the
    threshold), which ignores rank noise among sub-threshold individuals.
    """

    steps: int
    count_fractions: tuple[float, float, float, float]  # counts 0, 1, 2, >=3
    frac_any: float
    modal_count_window: int
    new_leaders_window: int
    new_leader_count: int
    distinct_leaders: int
    n_episodes: int
    mean_tenure: float
    median_tenure: float


def summarize_run(records: StepRecords, cfg: MetricsConfig | None = None) -> RunSummary:
    cfg = (cfg or MetricsConfig()).validate()
    m = len(records)
    if m == 0:
        raise InsufficientDataError("summarize_run needs at least one record")
    counts = records.count_above
    f0 = float(np.count_nonzero(counts == 0)) / m
    f1 = float(np.count_nonzero(counts == 1)) / m
    f2 = float(np.count_nonzero(counts == 2)) / m
    f3 = float(np.count_nonzero(counts >= 3)) / m
    frac_any = 1.0 - f0

    window_lo = m - max(1, int(round(cfg.stability_window * m)))
    w_counts = counts[window_lo:]
    w_leaders = records.leader[window_lo:]
    led = w_counts >= 1
    if np.any(led):
        vals, freq = np.unique(w_counts[led], return_counts=True)
        modal = int(vals[np.argmax(freq)])
        new_window = new_leader_count(w_leaders[led], cfg.leader_memory)
    else:
        modal = 0
        new_window = 0

    gated = records.leader[counts >= 1]
    nlc = new_leader_count(gated, cfg.leader_memory) if gated.size else 0
    distinct = int(np.unique(gated).size) if gated.size else 0

    episodes = detect_episodes(records, cfg)
    tenures = np.array([e.tenure_above for e in episodes], dtype=np.float64)
    mean_tenure = float(tenures.mean()) if tenures.size else float("nan")
    median_tenure = float(np.median(tenures)) if tenures.size else float("nan")

    return RunSummary(
        steps=m,
        count_fractions=(f0, f1, f2, f3),
        frac_any=frac_any,
        modal_count_window=modal,
        new_leaders_window=new_window,
        new_leader_count=nlc,
        distinct_leaders=distinct,
        n_episodes=len(episodes),
        mean_tenure=mean_tenure,
        median_tenure=median_tenure,
    )


def classify_phase(summary: RunSummary, cfg: MetricsConfig | None = None) -> PhaseLabel:
    """Map a run summary onto the five-phase taxonomy.

    No-leader when fewer than ``p_lead`` of all steps have anyone above the
    threshold; otherwise the modal above-threshold count over the stability
    window selects single versus double, and the regime is stable when the
    window's new-leader count does not exceed the number of concurrent
    leadership slots (the modal count).
    """
    cfg = (cfg or MetricsConfig()).validate()
    if summary.frac_any < cfg.p_lead or summary.modal_count_window == 0:
        return PhaseLabel.NO_LEADER
    double = summary.modal_count_window >= 2
    slots = max(summary.modal_count_window, 1)
    stable = summary.new_leaders_window <= slots
    if double:
        return PhaseLabel.STABLE_DOUBLE if stable else PhaseLabel.TRANSIENT_DOUBLE
    return PhaseLabel.STABLE_SINGLE if stable else PhaseLabel.TRANSIENT_SINGLE


def replacement_lag(records: StepRecords, threshold: float = 3.0,
                    cfg: MetricsConfig | None = None) -> np.ndarray:
    """Steps between each episode's end and the next episode's rise.

    Overlapping successions clamp to 0.  Returns an empty array with fewer
    than two episodes.
    """
    if cfg is None:
        cfg = MetricsConfig(threshold=threshold)
    episodes = detect_episodes(records, cfg)
    if len(episodes) < 2:
        return np.empty(0, dtype=np.int64)
    lags = [max(0, nxt.above_from - cur.above_to)
            for cur, nxt in zip(episodes, episodes[1:])]
    return np.array(lags, dtype=np.int64)
