"""Compiled kernels for the simulation hot loop.

Everything here is numba-jitted, single-threaded and GIL-free, and operates
in place on plain numpy arrays.  The RNG kernels advance the same
xoshiro256** state words that :class:`alliancesim.rng.RngStream` wraps, so
the Python-level step API and the fused whole-run loop consume one identical
stream.  Draw order per timestep is fixed and documented in
``rewire_phase``: permutation draws, then per actor in permuted order the
rewire coin, tie-break draws, and the target draw.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64_1 = np.uint64(1)
_DBL_SCALE = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True, nogil=True)
def next_u64(state):
    """Advance xoshiro256** by one step and return the output word."""
    s1 = state[1]
    result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    state[2] ^= state[0]
    state[3] ^= s1
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], 45)
    return result


@njit(cache=True, nogil=True)
def next_f64(state):
    """Uniform float64 in [0, 1) from the top 53 bits."""
    return np.float64(next_u64(state) >> np.uint64(11)) * _DBL_SCALE


@njit(cache=True, nogil=True)
def randbelow(state, bound):
    """Uniform uint64 in [0, bound) by rejection; bound >= 1."""
    threshold = (np.uint64(0) - bound) % bound  # 2^64 mod bound
    while True:
        x = next_u64(state)
        if x >= threshold:
            return x % bound


@njit(cache=True, nogil=True)
def shuffle_identity(perm, state):
    """Fill ``perm`` with a fresh uniform permutation of 0..n-1 (Fisher-Yates)."""
    n = perm.shape[0]
    for i in range(n):
        perm[i] = i
    for i in range(n - 1, 0, -1):
        j = np.int64(randbelow(state, np.uint64(i + 1)))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp


@njit(cache=True, nogil=True)
def init_links(n, lam, state, out_links, pool):
    """Draw each individual's lam distinct non-self targets uniformly.

    Per individual: partial Fisher-Yates over the ascending candidate pool,
    consuming exactly lam draws.
    """
    for i in range(n):
        idx = 0
        for j in range(n):
            if j != i:
                pool[idx] = j
                idx += 1
        for k in range(lam):
            m = np.int64(randbelow(state, np.uint64(n - 1 - k)))
            t = pool[k + m]
            pool[k + m] = pool[k]
            pool[k] = t
            out_links[i, k] = t


@njit(cache=True, nogil=True)
def fill_structure(out_links, indeg, adj, und_deg):
    """Recompute in-degrees, the adjacency mask, and per-individual counts of
    distinct partners linked in either direction (``und_deg``)."""
    n = out_links.shape[0]
    lam = out_links.shape[1]
    for i in range(n):
        indeg[i] = 0
        und_deg[i] = 0
    for i in range(n):
        for j in range(n):
            adj[i, j] = 0
    for i in range(n):
        for k in range(lam):
            j = out_links[i, k]
            indeg[j] += 1
            adj[i, j] = 1
    for i in range(n):
        cnt = 0
        for j in range(n):
            if j != i and (adj[i, j] != 0 or adj[j, i] != 0):
                cnt += 1
        und_deg[i] = cnt


@njit(cache=True, nogil=True)
def status_update(s, out_links, indeg, r, q, c, s_new):
    """One synchronous status update; writes the new statuses into ``s_new``.

    Per-link pooled status is c_i + c_j with c_i = r*s_i/d_i; the target
    receives the q share and the source keeps the rest.
    """
    n = s.shape[0]
    lam = out_links.shape[1]
    for i in range(n):
        c[i] = r * s[i] / (lam + indeg[i])
        s_new[i] = (1.0 - r) * s[i]
    for i in range(n):
        ci = c[i]
        for k in range(lam):
            j = out_links[i, k]
            link_status = ci + c[j]
            s_new[i] += (1.0 - q) * link_status
            s_new[j] += q * link_status
    return 0


@njit(cache=True, nogil=True)
def rewire_phase(s, out_links, indeg, adj, und_deg, r, q, w, either_direction,
                 state, perm, ev_actor, ev_old, ev_new):
    """One rewiring phase; mutates the link structure in place.

    Individuals act sequentially in a fresh random permutation, so earlier
    rewires are visible to later actors.  Returns the number of rewires
    performed; the first that many entries of the event buffers are filled.
    """
    n = s.shape[0]
    lam = out_links.shape[1]
    shuffle_identity(perm, state)
    n_events = 0
    for idx in range(n):
        i = perm[idx]
        if next_f64(state) >= w:
            continue
        # Least-valued outgoing link: value is what i gets back, ties uniform.
        ci = r * s[i] / (lam + indeg[i])
        j0 = out_links[i, 0]
        best_k = 0
        best_v = (1.0 - q) * (ci + r * s[j0] / (lam + indeg[j0]))
        ties = 1
        for k in range(1, lam):
            j = out_links[i, k]
            v = (1.0 - q) * (ci + r * s[j] / (lam + indeg[j]))
            if v < best_v:
                best_v = v
                best_k = k
                ties = 1
            elif v == best_v:
                ties += 1
                if randbelow(state, np.uint64(ties)) == np.uint64(0):
                    best_k = k
        # Eligible targets: not self, not already linked (direction per mode).
        if either_direction:
            m = n - 1 - und_deg[i]
        else:
            m = n - 1 - lam
        if m <= 0:
            continue
        pick = np.int64(randbelow(state, np.uint64(m)))
        new_t = -1
        cnt = 0
        for j in range(n):
            if j == i or adj[i, j] != 0:
                continue
            if either_direction and adj[j, i] != 0:
                continue
            if cnt == pick:
                new_t = j
                break
            cnt += 1
        old_t = out_links[i, best_k]
        out_links[i, best_k] = new_t
        adj[i, old_t] = 0
        if adj[old_t, i] == 0:
            und_deg[i] -= 1
            und_deg[old_t] -= 1
        if adj[new_t, i] == 0:
            und_deg[i] += 1
            und_deg[new_t] += 1
        adj[i, new_t] = 1
        indeg[old_t] -= 1
        indeg[new_t] += 1
        ev_actor[n_events] = i
        ev_old[n_events] = old_t
        ev_new[n_events] = new_t
        n_events += 1
    return n_events


@njit(cache=True, nogil=True)
def simulate_loop(s, out_links, indeg, adj, und_deg, r, q, w, either_direction,
                  steps, state, theta, rec_stride,
                  rec_step, rec_leader, rec_lstatus, rec_count, rec_total,
                  hist_period, hist_counts,
                  snap_stride, snap_step, snap_status,
                  perm, c_buf, s_new, ev_actor, ev_old, ev_new):
    """Fused whole-run loop: update, rewire, and record without leaving numba.

    Recording conventions (t is the 1-based post-step index):
      records at t % rec_stride == 0, degree-histogram samples at
      t % hist_period == 0, status snapshots at t % snap_stride == 0 when
      snap_stride > 0.  Returns (records, histogram samples, snapshots,
      total rewires).
    """
    n = s.shape[0]
    n_rec = 0
    n_hist = 0
    n_snap = 0
    total_rewires = 0
    for t in range(1, steps + 1):
        status_update(s, out_links, indeg, r, q, c_buf, s_new)
        for i in range(n):
            s[i] = s_new[i]
        total_rewires += rewire_phase(s, out_links, indeg, adj, und_deg, r, q,
                                      w, either_direction, state, perm,
                                      ev_actor, ev_old, ev_new)
        if t % rec_stride == 0:
            best = s[0]
            leader = 0
            above = 0
            total = 0.0
            for i in range(n):
                si = s[i]
                total += si
                if si > best:
                    best = si
                    leader = i
                if si > theta:
                    above += 1
            rec_step[n_rec] = t
            rec_leader[n_rec] = leader
            rec_lstatus[n_rec] = best
            rec_count[n_rec] = above
            rec_total[n_rec] = total
            n_rec += 1
        if t % hist_period == 0:
            for i in range(n):
                hist_counts[indeg[i]] += 1
            n_hist += 1
        if snap_stride > 0 and t % snap_stride == 0:
            snap_step[n_snap] = t
            for i in range(n):
                snap_status[n_snap, i] = s[i]
            n_snap += 1
    return n_rec, n_hist, n_snap, total_rewires
