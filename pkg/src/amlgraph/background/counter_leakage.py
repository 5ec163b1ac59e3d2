"""Legitimate activity that mimics fraud signatures.

Every kind is built from "units" (one burst, one chain, one inflow/outflow
sequence, ...).  Units are generated in bulk until the next one would exceed
the edge budget.  A fraction ``rho`` of fraudulent accounts anchors the first
units so that labels cannot be read off topology alone.
"""

from __future__ import annotations

import numpy as np

from .._kernels import decay_chain, resolve_self_loops, segmented_cumsum
from ..errors import UnknownKind
from ..model import CAT_CODE
from .amounts import sample_mixed, sample_structuring_amount
from .baseline import TXN_TYPES, _pick, columns, empty_columns, typed_edges

KINDS = ("bursts", "chains", "rapid_flow", "cash_ops", "structuring", "high_risk_activity", "periodic")

_PAY, _TR, _WD, _DEP = 0, 1, 2, 3


def _unit_sizes(rng, lo, hi, budget):
    """Sizes ``U[lo, hi]`` drawn until the next unit would overflow ``budget``."""
    if budget < lo:
        return np.empty(0, dtype=np.int64)
    n = budget // lo + 1
    sizes = rng.integers(lo, hi + 1, size=n)
    keep = np.searchsorted(np.cumsum(sizes), budget, side="right")
    return sizes[:keep]


def _anchors(ctx, pool, n_units, rng):
    """One anchor account per unit; the first ones are mixed-in fraud accounts."""
    rho = float(rng.uniform(*ctx.fraud_mix)) if ctx.fraud_accounts.size else 0.0
    k = min(int(round(rho * ctx.fraud_accounts.size)), n_units)
    fraud = rng.choice(ctx.fraud_accounts, size=k, replace=False) if k else np.empty(0, np.int64)
    rest = _pick(pool, rng, n_units - k) if pool.size else np.empty(0, np.int64)
    mixed = k / ctx.fraud_accounts.size if ctx.fraud_accounts.size else 0.0
    return np.concatenate([fraud, rest]).astype(np.int64), mixed


def _positions(sizes):
    starts = np.cumsum(sizes) - sizes
    return np.arange(int(sizes.sum())) - np.repeat(starts, sizes)


def _unit_starts(ctx, rng, n_units, span):
    hi = max(ctx.start_ts, ctx.end_ts - span)
    return rng.integers(ctx.start_ts, hi + 1, size=n_units)


def _window_offsets(rng, sizes, window):
    """Sorted offsets within ``[0, window]`` per unit, first offset 0."""
    n = int(sizes.sum())
    off = rng.integers(0, window + 1, size=n)
    pos = _positions(sizes)
    off[pos == 0] = 0
    unit = np.repeat(np.arange(sizes.size), sizes)
    order = np.lexsort((off, unit))
    return off[order]


def _typed_amounts(ctx, types, rng):
    return sample_mixed(types, ctx.model, TXN_TYPES, rng)


def bursts(ctx, p, budget, rng):
    sizes = _unit_sizes(rng, *p.burst_size, budget)
    if sizes.size == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, sizes.size, rng)
    src = np.repeat(anchors, sizes)
    w = ctx.type_weights[:2] / ctx.type_weights[:2].sum()
    types = rng.choice(2, size=src.size, p=w)
    s, d, _, c = typed_edges(ctx, src, types, rng, overlay=False)
    amt = _typed_amounts(ctx, types, rng)
    ts = np.repeat(_unit_starts(ctx, rng, sizes.size, p.burst_window), sizes) + _window_offsets(rng, sizes,
                                                                                              p.burst_window)
    return columns(s, d, amt, ts, c), mixed


def chains(ctx, p, budget, rng):
    sizes = _unit_sizes(rng, *p.chain_hops, budget)
    if sizes.size == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, sizes.size, rng)
    n = int(sizes.sum())
    pos = _positions(sizes)
    # hop k leaves the account hop k-1 reached; repair self-loops hop by hop
    nxt = _pick(ctx.active_accounts, rng, n)
    src = np.empty(n, dtype=np.int64)
    dst = np.empty(n, dtype=np.int64)
    first = pos == 0
    for k in range(int(sizes.max())):
        idx = np.flatnonzero(pos == k)
        src[idx] = anchors if k == 0 else dst[idx - 1]
        dst[idx] = resolve_self_loops(src[idx], nxt[idx], ctx.active_accounts)
    start_amt = _typed_amounts(ctx, np.full(sizes.size, _TR), rng)
    factors = rng.uniform(0.95, 0.99, size=n)
    amt = decay_chain(start_amt, factors, sizes)
    delays = rng.integers(p.chain_hop_delay[0], p.chain_hop_delay[1] + 1, size=n)
    delays[first] = 0
    span = (p.chain_hops[1] - 1) * p.chain_hop_delay[1]
    ts = np.repeat(_unit_starts(ctx, rng, sizes.size, span), sizes) + segmented_cumsum(delays, sizes)
    return columns(src, dst, amt, ts, np.full(n, CAT_CODE["transfer"])), mixed


def rapid_flow(ctx, p, budget, rng):
    lo = p.rapid_inflows[0] + p.rapid_withdrawals[0]
    n_in_all = rng.integers(p.rapid_inflows[0], p.rapid_inflows[1] + 1, size=budget // lo + 1)
    n_out_all = rng.integers(p.rapid_withdrawals[0], p.rapid_withdrawals[1] + 1, size=n_in_all.size)
    keep = np.searchsorted(np.cumsum(n_in_all + n_out_all), budget, side="right") if budget >= lo else 0
    n_in, n_out = n_in_all[:keep], n_out_all[:keep]
    if keep == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, keep, rng)
    t0 = _unit_starts(ctx, rng, keep, p.rapid_inflow_window + p.rapid_delay[1] + p.rapid_inflow_window)
    a_in = np.repeat(anchors, n_in)
    s_in = resolve_self_loops(a_in, _pick(ctx.active_accounts, rng, a_in.size), ctx.active_accounts)
    ts_in = np.repeat(t0, n_in) + _window_offsets(rng, n_in, p.rapid_inflow_window)
    amt_in = _typed_amounts(ctx, np.full(a_in.size, _TR), rng)
    a_out = np.repeat(anchors, n_out)
    phase = t0 + p.rapid_inflow_window + rng.integers(p.rapid_delay[0], p.rapid_delay[1] + 1, size=keep)
    ts_out = np.repeat(phase, n_out) + _window_offsets(rng, n_out, p.rapid_inflow_window)
    amt_out = _typed_amounts(ctx, np.full(a_out.size, _WD), rng)
    return columns(
        np.concatenate([s_in, a_out]),
        np.concatenate([a_in, ctx.cash_of[a_out]]),
        np.concatenate([amt_in, amt_out]),
        np.concatenate([ts_in, ts_out]),
        np.concatenate([np.full(a_in.size, CAT_CODE["transfer"]), np.full(a_out.size, CAT_CODE["withdrawal"])]),
    ), mixed


def _mode_sizes(rng, budget, share, burst_range):
    """Unit sizes for kinds mixing single edges with short bursts."""
    if budget <= 0:
        return np.empty(0, dtype=np.int64)
    n = budget + 1
    burst = rng.random(n) < share
    sizes = np.where(burst, rng.integers(burst_range[0], burst_range[1] + 1, size=n), 1)
    keep = np.searchsorted(np.cumsum(sizes), budget, side="right")
    return sizes[:keep]


def cash_ops(ctx, p, budget, rng):
    sizes = _mode_sizes(rng, budget, p.cash_rapid_share, p.cash_rapid_deposits)
    if sizes.size == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, sizes.size, rng)
    acct = np.repeat(anchors, sizes)
    # singletons are deposits or withdrawals; multi-edge units are rapid deposits
    single = np.repeat(sizes == 1, sizes)
    types = np.where(single & (rng.random(acct.size) < 0.5), _WD, _DEP)
    s, d, _, c = typed_edges(ctx, acct, types, rng, overlay=False)
    amt = _typed_amounts(ctx, types, rng)
    ts = np.repeat(_unit_starts(ctx, rng, sizes.size, p.cash_rapid_window), sizes) + _window_offsets(
        rng, sizes, p.cash_rapid_window)
    return columns(s, d, amt, ts, c), mixed


def structuring(ctx, p, budget, rng):
    sizes = _mode_sizes(rng, budget, p.structuring_burst_share, p.structuring_burst_deposits)
    if sizes.size == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, sizes.size, rng)
    acct = np.repeat(anchors, sizes)
    amt = sample_structuring_amount(ctx.model, rng, size=acct.size, low=p.structuring_low, high=p.structuring_high)
    ts = np.repeat(_unit_starts(ctx, rng, sizes.size, p.structuring_burst_window), sizes) + _window_offsets(
        rng, sizes, p.structuring_burst_window)
    return columns(np.full(acct.size, ctx.cash), acct, amt, ts, np.full(acct.size, CAT_CODE["deposit"])), mixed


def high_risk_activity(ctx, p, budget, rng):
    sizes = _unit_sizes(rng, *p.high_risk_unit_size, budget)
    if sizes.size == 0:
        return empty_columns(), 0.0
    pool = ctx.high_risk_accounts if ctx.high_risk_accounts.size else ctx.active_accounts
    anchors, mixed = _anchors(ctx, pool, sizes.size, rng)
    src = np.repeat(anchors, sizes)
    types = rng.choice(len(TXN_TYPES), size=src.size, p=ctx.type_weights)
    s, d, a, c = typed_edges(ctx, src, types, rng)
    ts = rng.integers(ctx.start_ts, ctx.end_ts + 1, size=src.size)
    return columns(s, d, a, ts, c), mixed


def periodic(ctx, p, budget, rng):
    span = ctx.end_ts - ctx.start_ts
    eps = p.periodic_epsilon
    periods = [per for per in p.periodic_periods
               if per > eps and (span - eps) // (per + eps) + 1 >= p.periodic_min_count]
    if not periods or budget < p.periodic_min_count:
        return empty_columns(), 0.0
    n_try = budget // p.periodic_min_count + 1
    per = np.array(periods, dtype=np.int64)[rng.integers(0, len(periods), size=n_try)]
    c_max = (span - eps) // (per + eps) + 1
    counts = p.periodic_min_count + np.floor(rng.random(n_try) * (c_max - p.periodic_min_count + 1)).astype(np.int64)
    keep = np.searchsorted(np.cumsum(counts), budget, side="right")
    per, counts = per[:keep], counts[:keep]
    if keep == 0:
        return empty_columns(), 0.0
    anchors, mixed = _anchors(ctx, ctx.active_accounts, keep, rng)
    targets = resolve_self_loops(anchors, _pick(ctx.active_accounts, rng, keep), ctx.active_accounts)
    n = int(counts.sum())
    gaps = np.repeat(per, counts) + rng.integers(-eps, eps + 1, size=n)
    gaps[_positions(counts) == 0] = 0
    offsets = segmented_cumsum(gaps, counts)
    dur = (counts - 1) * (per + eps)
    t0 = ctx.start_ts + np.floor(rng.random(keep) * (span - dur + 1)).astype(np.int64)
    ts = np.repeat(t0, counts) + offsets
    amt = _typed_amounts(ctx, np.full(n, _TR), rng)
    return columns(np.repeat(anchors, counts), np.repeat(targets, counts), amt, ts,
                   np.full(n, CAT_CODE["transfer"])), mixed


GENERATORS = {
    "bursts": bursts,
    "chains": chains,
    "rapid_flow": rapid_flow,
    "cash_ops": cash_ops,
    "structuring": structuring,
    "high_risk_activity": high_risk_activity,
    "periodic": periodic,
}


def generate_counter_leakage(ctx, kind, params, budget, rng):
    """Edges of one counter-leakage kind and the achieved fraud mixing ratio."""
    if kind not in GENERATORS:
        raise UnknownKind(kind)
    return GENERATORS[kind](ctx, params, int(budget), rng)
