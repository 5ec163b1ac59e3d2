"""Hot integer kernels with a numba path and a pure-numpy path.

Set ``AMLGRAPH_DISABLE_NUMBA=1`` to force the numpy path.  Both paths return
bit-identical results; the test suite checks this.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("AMLGRAPH_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes")


# -- inter-arrival deltas ---------------------------------------------------


def inter_arrival_py(src, ts, n_nodes):
    """Per-source gap to the previous edge; ``src``/``ts`` are in chronological order."""
    n = src.shape[0]
    out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return out
    order = np.argsort(src, kind="stable")
    s = src[order]
    t = ts[order]
    gaps = np.diff(t)
    same = s[1:] == s[:-1]
    out[order[1:]] = np.where(same, gaps, 0)
    return out


def _inter_arrival_loop(src, ts, n_nodes):
    n = src.shape[0]
    out = np.zeros(n, dtype=np.int64)
    last = np.full(n_nodes, -1, dtype=np.int64)
    for i in range(n):
        s = src[i]
        if last[s] >= 0:
            out[i] = ts[i] - last[s]
        last[s] = ts[i]
    return out


# -- segmented cumulative sum --------------------------------------------------


def segmented_cumsum_py(values, sizes):
    """Inclusive cumulative sum restarted at every segment boundary."""
    values = np.asarray(values, dtype=np.int64)
    total = np.cumsum(values)
    if total.shape[0] == 0:
        return total
    starts = np.cumsum(sizes) - sizes
    base = np.where(starts > 0, total[np.maximum(starts - 1, 0)], 0)
    return total - np.repeat(base, sizes)


def _segmented_cumsum_loop(values, sizes):
    out = np.empty(values.shape[0], dtype=np.int64)
    pos = 0
    for k in range(sizes.shape[0]):
        acc = 0
        for j in range(sizes[k]):
            acc += values[pos]
            out[pos] = acc
            pos += 1
    return out


# -- decaying hop amounts ------------------------------------------------------


def decay_chain_py(start, factors, sizes):
    """Amounts along hop chains: first hop ``start``, then ``round(prev * factor)``.

    ``factors`` has one entry per hop; the entry of each chain's first hop is
    ignored.  Amounts never rise and fall by at least one minor unit per hop
    while above one unit.
    """
    n = factors.shape[0]
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    starts = np.cumsum(sizes) - sizes
    pos = np.arange(n) - np.repeat(starts, sizes)
    out[starts] = start
    for k in range(1, int(sizes.max())):
        idx = np.flatnonzero(pos == k)
        prev = out[idx - 1]
        nxt = np.floor(prev * factors[idx] + 0.5).astype(np.int64)
        out[idx] = np.maximum(np.minimum(nxt, prev - 1), 1)
    return out


def _decay_chain_loop(start, factors, sizes):
    out = np.empty(factors.shape[0], dtype=np.int64)
    pos = 0
    for k in range(sizes.shape[0]):
        for j in range(sizes[k]):
            if j == 0:
                out[pos] = start[k]
            else:
                prev = out[pos - 1]
                nxt = np.int64(np.floor(prev * factors[pos] + 0.5))
                if nxt > prev - 1:
                    nxt = prev - 1
                if nxt < 1:
                    nxt = 1
                out[pos] = nxt
            pos += 1
    return out


# -- self-loop repair ----------------------------------------------------------


def resolve_self_loops_py(src, dst, pool):
    """Replace ``dst[i] == src[i]`` by the next pool entry after ``dst[i]``'s slot.

    ``pool`` is sorted and every ``dst`` value is drawn from it, so the fix
    stays inside the pool and is deterministic.
    """
    dst = dst.copy()
    bad = np.flatnonzero(dst == src)
    if bad.size and pool.shape[0] > 1:
        slot = np.searchsorted(pool, dst[bad])
        dst[bad] = pool[(slot + 1) % pool.shape[0]]
    return dst


def _resolve_self_loops_loop(src, dst, pool):
    out = dst.copy()
    m = pool.shape[0]
    if m < 2:
        return out
    for i in range(out.shape[0]):
        if out[i] == src[i]:
            slot = np.searchsorted(pool, out[i])
            out[i] = pool[(slot + 1) % m]
    return out


if HAVE_NUMBA:
    inter_arrival_nb = njit(cache=True, nogil=True)(_inter_arrival_loop)
    segmented_cumsum_nb = njit(cache=True, nogil=True)(_segmented_cumsum_loop)
    decay_chain_nb = njit(cache=True, nogil=True)(_decay_chain_loop)
    resolve_self_loops_nb = njit(cache=True, nogil=True)(_resolve_self_loops_loop)
else:  # pragma: no cover
    inter_arrival_nb = _inter_arrival_loop
    segmented_cumsum_nb = _segmented_cumsum_loop
    decay_chain_nb = _decay_chain_loop
    resolve_self_loops_nb = _resolve_self_loops_loop


def _pick(nb, py):
    return nb if USE_NUMBA else py


def inter_arrival(src, ts, n_nodes):
    src = np.ascontiguousarray(src, dtype=np.int64)
    ts = np.ascontiguousarray(ts, dtype=np.int64)
    return _pick(inter_arrival_nb, inter_arrival_py)(src, ts, int(n_nodes))


def segmented_cumsum(values, sizes):
    values = np.ascontiguousarray(values, dtype=np.int64)
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    return _pick(segmented_cumsum_nb, segmented_cumsum_py)(values, sizes)


def decay_chain(start, factors, sizes):
    start = np.ascontiguousarray(start, dtype=np.int64)
    factors = np.ascontiguousarray(factors, dtype=np.float64)
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    return _pick(decay_chain_nb, decay_chain_py)(start, factors, sizes)


def resolve_self_loops(src, dst, pool):
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    pool = np.ascontiguousarray(pool, dtype=np.int64)
    return _pick(resolve_self_loops_nb, resolve_self_loops_py)(src, dst, pool)


def backend():
    return "numba" if USE_NUMBA else "numpy"
