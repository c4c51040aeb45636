"""Core alliance-network model: status sharing and least-value link rewiring.

One timestep is a synchronous status update followed by a stochastic
rewiring phase.  Every individual holds a status (all start at 1.0, so the
population total stays equal to n) and lam outgoing alliance links.  Each
update an individual pools the fraction r of its status equally over its
incident links; a link's pooled status is split q to the link's target and
(1-q) back to its source.  Each rewiring phase an individual, with
probability w, moves its least-valuable outgoing link to a uniformly chosen
individual it is not linked with.

All randomness flows through one seeded :class:`~alliancesim.rng.RngStream`,
so a (params, seed) pair fixes the full trajectory, including rewire events.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidParamsError, MissingLinkError
from .rng import RngStream

REWIRE_EXCLUSION_MODES = ("either", "out-only")

Observer = Callable[[int, "NetworkState", list], None]


@dataclass(frozen=True)
class ModelParams:
    """All model constants plus run length and master seed.

    ``lam`` is the out-link count per individual, ``r`` the shared status
    proportion per step, ``q`` the inequality split assigned to a link's
    target, and ``w`` the per-individual rewiring probability per step.
    ``rewire_exclusion`` selects which existing links disqualify a rewiring
    candidate: "either" excludes links in either direction, "out-only" only
    the actor's own out-targets (kept as a cheap sensitivity toggle).
    """

    n: int = 50
    lam: int = 3
    r: float = 0.2
    q: float = 0.5
    w: float = 0.5
    steps: int = 2_000_000
    seed: int = 0
    rewire_exclusion: str = "either"

    def validate(self) -> "ModelParams":
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidParamsError(f"n must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.lam, int) or self.lam < 1:
            raise InvalidParamsError(f"lambda must be an integer >= 1, got {self.lam!r}")
        if self.lam > self.n - 1:
            raise InvalidParamsError(
                f"lambda must be <= n - 1 (each individual needs {self.lam} "
                f"distinct non-self targets, only {self.n - 1} exist)")
        for name in ("r", "q", "w"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise InvalidParamsError(f"{name} must lie in [0, 1], got {value!r}")
        if not isinstance(self.steps, int) or self.steps < 0:
            raise InvalidParamsError(f"steps must be a non-negative integer, got {self.steps!r}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2 ** 64):
            raise InvalidParamsError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.rewire_exclusion not in REWIRE_EXCLUSION_MODES:
            raise InvalidParamsError(
                f"rewire_exclusion must be one of {REWIRE_EXCLUSION_MODES}, "
                f"got {self.rewire_exclusion!r}")
        return self

    def with_overrides(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass
class NetworkState:
    """Statuses plus ordered out-link lists; a self-contained value.

    ``out_links`` is an (n, lam) integer matrix; row i holds individual i's
    lam distinct non-self targets in list order.
    """

    statuses: np.ndarray
    out_links: np.ndarray
    step: int = 0

    @property
    def n(self) -> int:
        return self.statuses.shape[0]

    @property
    def lam(self) -> int:
        return self.out_links.shape[1]

    def copy(self) -> "NetworkState":
        return NetworkState(self.statuses.copy(), self.out_links.copy(), self.step)


@dataclass(frozen=True)
class RewireEvent:
    """Observer record of one rewire: actor moved old_target -> new_target."""

    actor: int
    old_target: int
    new_target: int
    step: int


def init_network(params: ModelParams, rng: RngStream | None = None) -> NetworkState:
    """Uniform starting state: all statuses 1.0, random lam-out-regular links.

    Each individual's targets are drawn uniformly without replacement from
    the other n-1 individuals; mutual links and in-degree-0 individuals are
    allowed.
    """
    params.validate()
    if rng is None:
        rng = RngStream(params.seed)
    statuses = np.ones(params.n, dtype=np.float64)
    out_links = np.empty((params.n, params.lam), dtype=np.int64)
    pool = np.empty(params.n - 1, dtype=np.int64)
    _kernels.init_links(params.n, params.lam, rng.state, out_links, pool)
    return NetworkState(statuses, out_links, step=0)


def incident_degree(state: NetworkState, i: int) -> int:
    """d_i: the individual's lam out-links plus all links pointing at it."""
    return state.lam + int(np.count_nonzero(state.out_links == i))


def incident_degrees(state: NetworkState) -> np.ndarray:
    """All d_i at once (lam + in-degree per individual)."""
    indeg = np.bincount(state.out_links.ravel(), minlength=state.n)
    return indeg + state.lam


def status_update(state: NetworkState, params: ModelParams) -> NetworkState:
    """Synchronous update from the pre-update statuses; conserves the total."""
    n = state.n
    indeg = np.ascontiguousarray(
        np.bincount(state.out_links.ravel(), minlength=n).astype(np.int64))
    c_buf = np.empty(n, dtype=np.float64)
    s_new = np.empty(n, dtype=np.float64)
    _kernels.status_update(state.statuses, state.out_links, indeg,
                           params.r, params.q, c_buf, s_new)
    return NetworkState(s_new, state.out_links.copy(), state.step)


def link_value(state: NetworkState, params: ModelParams, source: int, target: int) -> float:
    """Status the source gets back from one of its links in a single update.

    (1-q) * (r*s_source/d_source + r*s_target/d_target); the arg-min over a
    source's out-links therefore only depends on s_target/d_target.
    """
    if target not in state.out_links[source]:
        raise MissingLinkError(f"no link {source} -> {target}")
    d = incident_degrees(state)
    pooled = (params.r * state.statuses[source] / d[source]
              + params.r * state.statuses[target] / d[target])
    return (1.0 - params.q) * pooled


def rewire_step(state: NetworkState, params: ModelParams,
                rng: RngStream) -> tuple[NetworkState, list[RewireEvent]]:
    """One rewiring phase; statuses are untouched, only out-lists change.

    Actors are processed in a fresh random permutation; link values and
    eligibility are checked against the mid-phase state, so earlier rewires
    are visible to later actors.  An actor with an empty eligible set does
    nothing.
    """
    new_state = state.copy()
    n = state.n
    indeg = np.zeros(n, dtype=np.int64)
    und_deg = np.zeros(n, dtype=np.int64)
    adj = np.zeros((n, n), dtype=np.uint8)
    _kernels.fill_structure(new_state.out_links, indeg, adj, und_deg)
    perm = np.empty(n, dtype=np.int64)
    ev_actor = np.empty(n, dtype=np.int64)
    ev_old = np.empty(n, dtype=np.int64)
    ev_new = np.empty(n, dtype=np.int64)
    n_events = _kernels.rewire_phase(
        new_state.statuses, new_state.out_links, indeg, adj, und_deg,
        params.r, params.q, params.w, params.rewire_exclusion == "either",
        rng.state, perm, ev_actor, ev_old, ev_new)
    events = [RewireEvent(int(ev_actor[k]), int(ev_old[k]), int(ev_new[k]), state.step)
              for k in range(n_events)]
    return new_state, events


def step(state: NetworkState, params: ModelParams,
         rng: RngStream) -> tuple[NetworkState, list[RewireEvent]]:
    """One timestep: status update, then rewiring, then step counter + 1."""
    updated = status_update(state, params)
    rewired, events = rewire_step(updated, params, rng)
    rewired.step = state.step + 1
    events = [replace(e, step=rewired.step) for e in events]
    return rewired, events


def simulate(params: ModelParams, observers: Sequence[Observer] = ()) -> NetworkState:
    """Run ``params.steps`` timesteps from a fresh network.

    Each observer is called after every timestep as
    ``observer(step_index, state, events)`` with the 1-based post-step index.
    This is the readable reference path; :func:`alliancesim.runner.run_recorded`
    runs the identical trajectory in one compiled loop.
    """
    params.validate()
    rng = RngStream(params.seed)
    state = init_network(params, rng)
    for _ in range(params.steps):
        state, events = step(state, params, rng)
        for observer in observers:
            observer(state.step, state, events)
    return state


def validate_state(state: NetworkState, params: ModelParams) -> None:
    """Assert the structural invariants; raises AssertionError on violation."""
    n, lam = params.n, params.lam
    assert state.statuses.shape == (n,)
    assert state.out_links.shape == (n, lam)
    for i in range(n):
        row = state.out_links[i]
        assert i not in row, f"self-link at {i}"
        assert len(set(row.tolist())) == lam, f"duplicate targets at {i}"
        assert row.min() >= 0 and row.max() < n
