"""Invariant and property tests on randomized inputs."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import alliancesim as asim
from alliancesim.model import validate_state
from alliancesim.rng import RngStream


def draw_params(n, lam, r, q, w, seed, mode="either"):
    return asim.ModelParams(n=n, lam=lam, r=r, q=q, w=w, steps=0, seed=seed,
                            rewire_exclusion=mode)


small_params = st.integers(2, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.integers(1, n - 1),
    st.floats(0.0, 1.0, allow_nan=False),
    st.floats(0.0, 1.0, allow_nan=False),
    st.floats(0.0, 1.0, allow_nan=False),
    st.integers(0, 2 ** 32),
))


@settings(max_examples=60, deadline=None)
@given(small_params)
def test_single_update_conserves_total(args):
    n, lam, r, q, w, seed = args
    params = draw_params(n, lam, r, q, w, seed)
    state = asim.init_network(params)
    state.statuses[:] = np.random.default_rng(seed).uniform(0.1, 2.0, n)
    state.statuses *= n / state.statuses.sum()
    out = asim.status_update(state, params)
    assert abs(out.statuses.sum() - n) <= 1e-12 * n


@settings(max_examples=60, deadline=None)
@given(small_params)
def test_positivity_floor_under_partial_sharing(args):
    n, lam, r, q, w, seed = args
    params = draw_params(n, lam, min(r, 0.999), q, w, seed)
    state = asim.init_network(params)
    state.statuses[:] = np.random.default_rng(seed + 1).uniform(0.05, 2.0, n)
    out = asim.status_update(state, params)
    assert np.all(out.statuses >= (1.0 - params.r) * state.statuses - 1e-15)
    assert np.all(out.statuses > 0.0)


@settings(max_examples=40, deadline=None)
@given(small_params, st.integers(0, 2 ** 16))
def test_permutation_equivariance(args, perm_seed):
    n, lam, r, q, w, seed = args
    params = draw_params(n, lam, r, q, w, seed)
    state = asim.init_network(params)
    state.statuses[:] = np.random.default_rng(seed + 2).uniform(0.1, 2.0, n)

    perm = np.random.default_rng(perm_seed).permutation(n)
    relabeled = asim.NetworkState(
        statuses=np.empty(n), out_links=np.empty((n, lam), dtype=np.int64))
    relabeled.statuses[perm] = state.statuses
    relabeled.out_links[perm] = perm[state.out_links]

    updated_then_relabeled = np.empty(n)
    updated_then_relabeled[perm] = asim.status_update(state, params).statuses
    relabeled_then_updated = asim.status_update(relabeled, params).statuses
    assert np.all(np.abs(updated_then_relabeled - relabeled_then_updated) <= 1e-12)


@settings(max_examples=40, deadline=None)
@given(small_params)
def test_half_split_shares_links_equally(args):
    n, lam, r, _, w, seed = args
    params = draw_params(n, lam, r, 0.5, w, seed)
    state = asim.init_network(params)
    state.statuses[:] = np.random.default_rng(seed + 3).uniform(0.1, 2.0, n)
    d = asim.incident_degrees(state)
    for i in range(n):
        for j in state.out_links[i]:
            j = int(j)
            pooled = (params.r * state.statuses[i] / d[i]
                      + params.r * state.statuses[j] / d[j])
            source_share = asim.link_value(state, params, i, j)
            target_share = pooled - source_share
            assert abs(source_share - target_share) <= 1e-15


def test_structure_preserved_under_extreme_parameters():
    for q in (0.0, 0.5, 1.0):
        for r in (0.0, 0.37, 1.0):
            for mode in ("either", "out-only"):
                params = asim.ModelParams(n=9, lam=3, r=r, q=q, w=1.0, steps=0,
                                          seed=17, rewire_exclusion=mode)
                state = asim.init_network(params)
                rng = RngStream(23)
                for _ in range(120):
                    state, _ = asim.step(state, params, rng)
                    validate_state(state, params)


def test_rewiring_touches_only_out_lists():
    params = asim.ModelParams(n=14, lam=3, q=0.7, w=1.0, seed=2)
    state = asim.init_network(params)
    state.statuses[:] = np.random.default_rng(0).uniform(0.5, 1.5, 14)
    out, _ = asim.rewire_step(state, params, RngStream(4))
    assert np.array_equal(out.statuses, state.statuses)
    assert out.step == state.step


def test_trajectories_and_event_streams_deterministic():
    params = asim.ModelParams(n=16, lam=3, q=0.6, w=0.7, steps=200, seed=31)

    def trace():
        rng = RngStream(params.seed)
        state = asim.init_network(params, rng)
        events = []
        for _ in range(params.steps):
            state, evs = asim.step(state, params, rng)
            events.extend(evs)
        return state, events

    s1, e1 = trace()
    s2, e2 = trace()
    assert np.array_equal(s1.statuses, s2.statuses)
    assert np.array_equal(s1.out_links, s2.out_links)
    assert e1 == e2


@pytest.mark.parametrize("stride,hist_period,status_stride", [(1, 1, 0), (7, 13, 50)])
def test_fused_loop_matches_observer_path(stride, hist_period, status_stride):
    params = asim.ModelParams(n=22, lam=3, r=0.25, q=0.58, w=0.6, steps=1500, seed=8)
    cfg = asim.MetricsConfig(histogram_sample_period=hist_period)
    fast = asim.run_recorded(params, cfg, record_stride=stride,
                             status_stride=status_stride)
    recorder = asim.TrajectoryRecorder(cfg, record_stride=stride,
                                       status_stride=status_stride)
    final = asim.simulate(params, [recorder])
    slow = recorder.records()
    for field in ("step", "leader", "leader_status", "count_above", "total_status"):
        assert np.array_equal(getattr(slow, field), getattr(fast.records, field)), field
    assert np.array_equal(final.statuses, fast.final_state.statuses)
    assert np.array_equal(final.out_links, fast.final_state.out_links)
    assert np.array_equal(recorder.histogram().counts, fast.histogram.counts)
    assert recorder.histogram().sample_count == fast.histogram.sample_count
    if status_stride:
        snaps = recorder.snapshots()
        assert np.array_equal(snaps.step, fast.snapshots.step)
        assert np.array_equal(snaps.statuses, fast.snapshots.statuses)


def test_count_above_column_matches_state_recount():
    params = asim.ModelParams(n=18, lam=3, q=0.62, w=0.5, steps=400, seed=12)
    cfg = asim.MetricsConfig()
    recounts = []
    recorder = asim.TrajectoryRecorder(cfg)
    asim.simulate(params, [
        recorder,
        lambda t, state, evs: recounts.append(asim.count_above(state, cfg.threshold)),
    ])
    assert recorder.records().count_above.tolist() == recounts


def test_histogram_mass_identities_on_simulated_run():
    params = asim.ModelParams(n=20, lam=4, q=0.6, w=0.5, steps=600, seed=3)
    res = asim.run_recorded(params, asim.MetricsConfig(histogram_sample_period=5))
    hist = res.histogram
    xs = np.arange(hist.counts.size)
    assert hist.counts.sum() == hist.sample_count * params.n
    assert int((xs * hist.counts).sum()) == hist.sample_count * params.n * params.lam


def test_long_run_conservation_stays_tight():
    params = asim.ModelParams(n=50, lam=3, q=0.55, w=0.5, steps=20_000, seed=5)
    res = asim.run_recorded(params)
    assert np.max(np.abs(res.records.total_status - 50.0)) <= 1e-9 * 50
