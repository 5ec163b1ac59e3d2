"""Timestamp schedulers and layering hop chains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidPeriod, InvalidWindow, PoolExhausted
from ..model import HIGH_RISK_CLUSTERS, TransactionEdge


@dataclass(frozen=True)
class TemporalProfile:
    kind: str
    burst_window: int = 0
    period: int = 0
    epsilon: int = 0

    def __post_init__(self):
        if self.kind == "burst" and self.burst_window <= 0:
            raise InvalidWindow("burst window must be positive")
        if self.kind == "periodic" and not self.period > self.epsilon >= 0:
            raise InvalidPeriod("need period > epsilon >= 0")
        if self.kind not in ("burst", "periodic"):
            raise ValueError(f"unknown temporal profile {self.kind!r}")


def schedule_burst(n, window, t0, rng):
    """``n`` sorted timestamps starting at ``t0`` and spanning at most ``window`` seconds."""
    if n < 1 or window <= 0:
        raise InvalidWindow(f"need n >= 1 and window > 0 (n={n}, window={window})")
    offsets = np.sort(rng.integers(0, window + 1, size=n - 1))
    return [int(t0)] + [int(t0 + o) for o in offsets]


def schedule_periodic(n, period, epsilon, t0, rng):
    """``n`` timestamps whose consecutive gaps lie in ``period ± epsilon``."""
    if n < 1 or not period > epsilon >= 0:
        raise InvalidPeriod(f"need n >= 1 and period > epsilon >= 0 (period={period}, epsilon={epsilon})")
    gaps = period + rng.integers(-epsilon, epsilon + 1, size=n - 1)
    return [int(t0)] + [int(t0 + s) for s in np.cumsum(gaps)]


def layering_span(lp):
    """Worst-case extra duration added by a layered transfer."""
    return lp.h_max * lp.hop_delay_max if lp.enabled else 0


def _account_pool(graph, pool):
    key = f"layer_pool:{pool}"
    cached = graph.meta.get(key)
    if cached is None:
        if pool == "uniform":
            owners = None
        else:
            owners = set()
            for label in HIGH_RISK_CLUSTERS:
                owners |= graph.clusters.get(label, set())
        cached = [
            n.node_id
            for n in graph.node_list
            if n.node_type == "account" and n.account_category != "cash" and (owners is None or n.owner_id in owners)
        ]
        graph.meta[key] = cached
    return cached


def pick_intermediaries(graph, h, pool, forbidden_accounts, forbidden_owners, rng):
    """Draw ``h`` distinct accounts whose owners are not forbidden."""
    accounts = _account_pool(graph, pool)
    nodes = graph.nodes

    def ok(aid):
        return aid not in forbidden_accounts and nodes[aid].owner_id not in forbidden_owners

    if h == 0:
        return []
    n = len(accounts)
    # rejection sampling is cheap because forbidden sets are tiny next to the pool
    for _ in range(4):
        draw = rng.choice(n, size=min(n, 2 * h + 8), replace=False)
        out, seen_owners = [], set()
        for i in draw:
            aid = accounts[i]
            owner = nodes[aid].owner_id
            if ok(aid) and owner not in seen_owners:
                out.append(aid)
                seen_owners.add(owner)
                if len(out) == h:
                    return out
    eligible = [a for a in accounts if ok(a)]
    by_owner = {}
    for a in eligible:
        by_owner.setdefault(nodes[a].owner_id, a)
    eligible = sorted(by_owner.values())
    if len(eligible) < h:
        raise PoolExhausted(f"need {h} layering intermediaries, only {len(eligible)} eligible")
    return [eligible[i] for i in sorted(rng.choice(len(eligible), size=h, replace=False))]


def apply_layering(transfer, graph, lp, rng, forbidden_owners=(), anchor="start", max_total_delay=None,
                   category="transfer"):
    """Route ``transfer = (src, dst, amount, t)`` through ``h`` intermediary accounts.

    With ``anchor="start"`` the first hop leaves ``src`` at ``t``; with
    ``anchor="end"`` the last hop reaches ``dst`` at ``t``.  ``max_total_delay``
    caps the summed hop delays.  Amounts are integer minor units.
    """
    src, dst, amount, t = transfer
    if not lp.enabled:
        return [TransactionEdge(src, dst, int(amount), int(t), category, is_fraud=True)]
    h = int(rng.integers(lp.h_min, lp.h_max + 1))
    forbidden_owners = set(forbidden_owners) | {graph.nodes[src].owner_id, graph.nodes[dst].owner_id}
    mids = pick_intermediaries(graph, h, lp.pool, {src, dst}, forbidden_owners, rng)
    hi = lp.hop_delay_max
    if max_total_delay is not None:
        hi = min(hi, max_total_delay // h)
    lo = min(lp.hop_delay_min, hi)
    delays = rng.integers(lo, hi + 1, size=h)
    factors = rng.uniform(lp.decay_min, lp.decay_max, size=h)
    path = [src] + mids + [dst]
    t_first = int(t) if anchor == "start" else int(t) - int(delays.sum())
    times = [t_first] + [t_first + int(s) for s in np.cumsum(delays)]
    amounts = [int(amount)]
    for f in factors:
        prev = amounts[-1]
        amounts.append(max(min(int(math.floor(prev * f + 0.5)), prev - 1), 1))
    return [
        TransactionEdge(path[k], path[k + 1], amounts[k], times[k], category, is_fraud=True)
        for k in range(h + 1)
    ]
