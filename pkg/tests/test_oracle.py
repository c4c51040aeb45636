"""Status update checked against independent brute-force implementations.

Two oracles, sharing no code with the package: a float brute force over an
explicit link list, and an exact rational-arithmetic version of the same
rules.  The rational oracle also fixes the hand-computed three-node example.
"""

from fractions import Fraction

import numpy as np
import pytest

from alliancesim.model import ModelParams, NetworkState, status_update


def brute_force_update(statuses, out_links, r, q):
    """Explicit link enumeration: pool r*s/d per link end, split q/(1-q)."""
    n = len(statuses)
    links = [(i, j) for i in range(n) for j in out_links[i]]
    degree = [0] * n
    for i, j in links:
        degree[i] += 1
        degree[j] += 1
    share = [r * statuses[i] / degree[i] for i in range(n)]
    result = [(1.0 - r) * statuses[i] for i in range(n)]
    for i, j in links:
        pooled = share[i] + share[j]
        result[i] += (1.0 - q) * pooled
        result[j] += q * pooled
    return result


def rational_update(statuses, out_links, r, q):
    """Same rules in exact rational arithmetic."""
    n = len(statuses)
    statuses = [Fraction(s) for s in statuses]
    r, q = Fraction(r), Fraction(q)
    links = [(i, j) for i in range(n) for j in out_links[i]]
    degree = [0] * n
    for i, j in links:
        degree[i] += 1
        degree[j] += 1
    share = [r * statuses[i] / degree[i] for i in range(n)]
    result = [(1 - r) * statuses[i] for i in range(n)]
    for i, j in links:
        pooled = share[i] + share[j]
        result[i] += (1 - q) * pooled
        result[j] += q * pooled
    return result


def random_state(rng):
    n = int(rng.integers(2, 6))
    lam = int(rng.integers(1, n))
    out_links = np.empty((n, lam), dtype=np.int64)
    for i in range(n):
        others = [j for j in range(n) if j != i]
        out_links[i] = rng.choice(others, size=lam, replace=False)
    statuses = rng.uniform(0.05, 3.0, size=n)
    statuses *= n / statuses.sum()
    return NetworkState(statuses, out_links), n, lam


def test_hand_computed_three_node_example():
    # links 0->1, 1->0, 2->0; uniform statuses; r=0.2, q=0.7
    state = NetworkState(np.ones(3), np.array([[1], [0], [0]], dtype=np.int64))
    params = ModelParams(n=3, lam=1, r=0.2, q=0.7, steps=0)
    expected = rational_update([1, 1, 1], [[1], [0], [0]],
                               Fraction(1, 5), Fraction(7, 10))
    assert expected == [Fraction(173, 150), Fraction(29, 30), Fraction(22, 25)]
    got = status_update(state, params).statuses
    assert np.all(np.abs(got - np.array([float(e) for e in expected])) <= 1e-12)
    assert abs(got.sum() - 3.0) <= 1e-12


@pytest.mark.parametrize("batch", range(4))
def test_matches_brute_force_on_random_small_states(batch):
    rng = np.random.default_rng(1000 + batch)
    for _ in range(250):
        state, n, lam = random_state(rng)
        r = float(rng.uniform(0.0, 1.0))
        q = float(rng.uniform(0.0, 1.0))
        params = ModelParams(n=n, lam=lam, r=r, q=q, steps=0)
        got = status_update(state, params).statuses
        expected = brute_force_update(state.statuses.tolist(),
                                      state.out_links.tolist(), r, q)
        assert np.all(np.abs(got - np.array(expected)) <= 1e-12)


def test_matches_rational_oracle_on_random_small_states():
    rng = np.random.default_rng(4242)
    for _ in range(50):
        state, n, lam = random_state(rng)
        r = float(rng.uniform(0.0, 1.0))
        q = float(rng.uniform(0.0, 1.0))
        params = ModelParams(n=n, lam=lam, r=r, q=q, steps=0)
        got = status_update(state, params).statuses
        # Fraction(float) is exact, so the oracle sees identical inputs
        expected = rational_update(state.statuses.tolist(),
                                   state.out_links.tolist(),
                                   Fraction(r), Fraction(q))
        assert np.all(np.abs(got - np.array([float(e) for e in expected])) <= 1e-12)
