"""Baseline legitimate traffic: random payments, high-value, salaries, fraudster background.

Generators return edge columns keyed like ``EdgeStore`` (node indices, cents,
Unix seconds).  Every background edge carries ``fraud=False``.
"""

from __future__ import annotations

import calendar
import datetime as dt
from dataclasses import dataclass

import numpy as np

from .._kernels import resolve_self_loops
from ..model import CASH_NODE_ID, CAT_CODE
from .amounts import AmountModel, sample_high_value, sample_mixed

TXN_TYPES = ("payment", "transfer", "withdrawal", "deposit")


@dataclass
class BackgroundContext:
    """Index arrays over the populated, fraud-labelled graph."""

    start_ts: int
    end_ts: int
    days: int
    months: int
    business_hours: tuple
    cash: int
    n_nodes: int
    legit_accounts: np.ndarray
    fraud_accounts: np.ndarray
    active_accounts: np.ndarray
    business_accounts: np.ndarray
    high_value_accounts: np.ndarray
    high_risk_accounts: np.ndarray
    cash_of: np.ndarray
    type_weights: np.ndarray
    model: AmountModel
    overlay_share: float
    legit_businesses: list
    individual_accounts: np.ndarray
    primary_account: dict
    mix_ratio: float = 1.0
    fraud_mix: tuple = (0.5, 0.9)


def build_context(graph, cfg, rng):
    """Collect account pools.  ``rng`` only draws the fraud-account mixing subset."""
    pop = cfg.population
    nodes = graph.node_list
    legit, fraud, biz, high, hr_accts, indiv = [], [], [], [], [], []
    cash_of = np.full(len(nodes), -1, dtype=np.int64)
    high_paid = set(pop.high_paid_occupations)
    hr_min = cfg.background.counter_leakage.high_risk_min_score
    for n in nodes:
        if n.node_type != "account":
            continue
        owner = graph.nodes[n.owner_id]
        if n.account_category == "cash":
            continue
        cash_of[n.index] = graph.nodes[graph.cash_account_of[owner.node_id]].index
        (fraud if owner.is_fraudulent else legit).append(n.index)
        if owner.node_type == "business":
            biz.append(n.index)
        else:
            indiv.append(n.index)
        if (owner.node_type == "individual" and owner.occupation in high_paid) or (
            owner.node_type == "business" and owner.number_of_employees >= pop.high_value_min_employees
        ):
            high.append(n.index)
        if owner.risk_score >= hr_min:
            hr_accts.append(n.index)
    legit = np.array(legit, dtype=np.int64)
    fraud = np.array(fraud, dtype=np.int64)
    lo, hi = cfg.background.counter_leakage.fraud_mix
    rho = float(rng.uniform(lo, hi))
    k = int(round(rho * fraud.size))
    mixed = np.sort(rng.choice(fraud, size=k, replace=False)) if k else np.empty(0, dtype=np.int64)
    active = np.sort(np.concatenate([legit, mixed]))
    active_set = set(active.tolist())
    weights = dict(cfg.weights_normalized())
    legit_biz = [n for n in nodes if n.node_type == "business" and not n.is_fraudulent
                 and graph.noncash_accounts(n.node_id)]
    primary = {}
    for n in nodes:
        if n.node_type in ("individual", "business"):
            accts = graph.noncash_accounts(n.node_id)
            if accts:
                primary[n.node_id] = graph.nodes[accts[0]].index
    return BackgroundContext(
        start_ts=cfg.start_ts,
        end_ts=cfg.end_ts,
        days=cfg.days,
        months=cfg.months,
        business_hours=cfg.background.business_hours,
        cash=graph.nodes[CASH_NODE_ID].index,
        n_nodes=len(nodes),
        legit_accounts=legit,
        fraud_accounts=fraud,
        active_accounts=active,
        business_accounts=np.array(sorted(i for i in biz if i in active_set), dtype=np.int64),
        high_value_accounts=np.array(sorted(i for i in high if i in active_set), dtype=np.int64),
        high_risk_accounts=np.array(sorted(hr_accts), dtype=np.int64),
        cash_of=cash_of,
        type_weights=np.array([weights.get(t, 0.0) for t in TXN_TYPES]),
        model=AmountModel.from_config(cfg),
        overlay_share=cfg.background.structuring.share,
        legit_businesses=legit_biz,
        individual_accounts=np.array(sorted(i for i in indiv if i in active_set), dtype=np.int64),
        primary_account=primary,
        mix_ratio=rho if fraud.size else 0.0,
        fraud_mix=(lo, hi),
    )


def empty_columns():
    return {
        "src": np.empty(0, np.int64), "dst": np.empty(0, np.int64), "relation": 0,
        "amount": np.empty(0, np.int64), "ts": np.empty(0, np.int64),
        "category": np.empty(0, np.int8), "fraud": False,
    }


def columns(src, dst, amount, ts, category):
    return {"src": src, "dst": dst, "relation": 0, "amount": amount, "ts": ts,
            "category": np.asarray(category, dtype=np.int8), "fraud": False}


_TYPE_CAT = np.array([CAT_CODE[t] for t in TXN_TYPES], dtype=np.int8)


def _pick(pool, rng, n):
    return pool[rng.integers(0, pool.size, size=n)]


def typed_edges(ctx, src, types, rng, overlay=True):
    """Counterparties and amounts for outgoing edges of the given types.

    payment -> a business account; transfer -> any active account;
    deposit -> the account is credited from the global cash node;
    withdrawal -> the owner's own cash account.
    """
    n = src.shape[0]
    out_src = src.copy()
    dst = np.empty(n, dtype=np.int64)
    pay = types == 0
    tr = types == 1
    wd = types == 2
    dep = types == 3
    biz = ctx.business_accounts if ctx.business_accounts.size else ctx.active_accounts
    dst[pay] = resolve_self_loops(src[pay], _pick(biz, rng, int(pay.sum())), biz)
    dst[tr] = resolve_self_loops(src[tr], _pick(ctx.active_accounts, rng, int(tr.sum())), ctx.active_accounts)
    dst[wd] = ctx.cash_of[src[wd]]
    dst[dep] = src[dep]
    out_src[dep] = ctx.cash
    amount = sample_mixed(types, ctx.model, TXN_TYPES, rng, ctx.overlay_share if overlay else 0.0)
    return out_src, dst, amount, _TYPE_CAT[types]


def uniform_times(ctx, rng, n):
    return rng.integers(ctx.start_ts, ctx.end_ts + 1, size=n)


def business_hour_times(ctx, rng, n):
    day = rng.integers(0, ctx.days, size=n)
    open_, close = ctx.business_hours
    sec = rng.integers(open_ * 3600, close * 3600, size=n)
    return ctx.start_ts + day * 86400 + sec


def random_payment_count(rate, days, n_accounts, budget=None):
    n = int(np.floor(rate * days * n_accounts))
    return n if budget is None else min(n, int(budget))


def calibrated_weights(weights, other_counts, n):
    """Type weights for ``n`` new edges so that, together with ``other_counts``
    edges per type already generated, the overall mix follows ``weights``.

    Types already over-represented get weight 0.
    """
    w = np.asarray(weights, dtype=np.float64)
    w = w / w.sum()
    other = np.asarray(other_counts, dtype=np.float64)
    need = np.clip(w * (n + other.sum()) - other, 0, None)
    return need / need.sum() if need.sum() > 0 else w


def type_counts(category):
    """Edges per entry of ``TXN_TYPES`` in a category column; other categories are ignored."""
    c = np.asarray(category, dtype=np.int64)
    return np.array([int((c == CAT_CODE[t]).sum()) for t in TXN_TYPES], dtype=np.int64)


def random_payments(ctx, n, rng, type_weights=None):
    """``n`` random payments between active accounts, uniformly over the window."""
    if n <= 0 or ctx.active_accounts.size == 0:
        return empty_columns()
    p = ctx.type_weights if type_weights is None else type_weights
    types = rng.choice(len(TXN_TYPES), size=n, p=p)
    src = _pick(ctx.active_accounts, rng, n)
    s, d, a, c = typed_edges(ctx, src, types, rng)
    return columns(s, d, a, uniform_times(ctx, rng, n), c)


def generate_random_payments(ctx, rate, days, rng, budget=None):
    """Random payments, ``floor(rate * days * |A|)`` of them unless ``budget`` is smaller."""
    return random_payments(ctx, random_payment_count(rate, days, ctx.active_accounts.size, budget), rng)


def high_value_count(r_monthly, months, n_high):
    return int(np.floor(r_monthly * months * n_high))


def generate_high_value(ctx, r_monthly, months, rng):
    """Large transfers from high-earning accounts during business hours."""
    n = high_value_count(r_monthly, months, ctx.high_value_accounts.size)
    if n <= 0:
        return empty_columns()
    src = _pick(ctx.high_value_accounts, rng, n)
    dst = resolve_self_loops(src, _pick(ctx.active_accounts, rng, n), ctx.active_accounts)
    amount = sample_high_value(ctx.model, rng, n)
    return columns(src, dst, amount, business_hour_times(ctx, rng, n), np.full(n, CAT_CODE["transfer"]))


def pay_dates(start, end, schedule, pay_day, period_days, offset_days=0):
    """Calendar dates on which one employer pays, clamped to month ends."""
    out = []
    if schedule == "monthly":
        y, m = start.year, start.month
        while (y, m) <= (end.year, end.month):
            last = calendar.monthrange(y, m)[1]
            d = dt.date(y, m, min(pay_day, last))
            if start <= d <= end:
                out.append(d)
            y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    else:
        d = start + dt.timedelta(days=offset_days)
        while d <= end:
            out.append(d)
            d += dt.timedelta(days=period_days)
    return out


def generate_salaries(ctx, salary, start, end, rng, allocation=None):
    """Salary transfers from legitimate businesses to 1-3 fixed recipients each.

    Businesses are visited in a seeded random order and added while the
    running edge count stays within ``allocation``.
    """
    if not ctx.legit_businesses or ctx.individual_accounts.size == 0:
        return empty_columns()
    period = 14 if salary.schedule == "biweekly" else salary.period_days
    p = ctx.model.get("salary")
    order = rng.permutation(len(ctx.legit_businesses))
    src, dst, ts, amt = [], [], [], []
    total = 0
    open_, close = ctx.business_hours
    for bi in order:
        biz = ctx.legit_businesses[bi]
        k = int(rng.integers(salary.recipients[0], salary.recipients[1] + 1))
        pay_day = int(salary.pay_days[int(rng.integers(0, len(salary.pay_days)))])
        offset = int(rng.integers(0, period))
        dates = pay_dates(start, end, salary.schedule, pay_day, period, offset)
        if allocation is not None and total + k * len(dates) > allocation:
            break
        recips = _pick(ctx.individual_accounts, rng, k)
        base = np.clip(np.exp(p.mu + p.sigma * rng.standard_normal(k)), p.min, p.max)
        day_sec = np.array([(d - start).days * 86400 for d in dates], dtype=np.int64)
        for r, b in zip(recips, base):
            jitter = 1.0 + rng.uniform(-salary.jitter, salary.jitter, size=len(dates))
            src.append(np.full(len(dates), ctx.primary_account[biz.node_id]))
            dst.append(np.full(len(dates), r))
            amt.append(np.floor(b * jitter * 100 + 0.5).astype(np.int64))
            ts.append(ctx.start_ts + day_sec + rng.integers(open_ * 3600, close * 3600, size=len(dates)))
        total += k * len(dates)
    if not src:
        return empty_columns()
    n = total
    return columns(np.concatenate(src), np.concatenate(dst), np.concatenate(amt), np.concatenate(ts),
                   np.full(n, CAT_CODE["salary"]))


def fraudster_count(rate, days):
    return max(1, int(np.floor(rate * days)))


def generate_fraudster_background(ctx, rate, days, rng):
    """``max(1, floor(r*d))`` ordinary-looking edges per fraudulent account."""
    per = fraudster_count(rate, days)
    accts = np.repeat(ctx.fraud_accounts, per)
    n = accts.size
    if n == 0:
        return empty_columns()
    types = rng.choice(len(TXN_TYPES), size=n, p=ctx.type_weights)
    s, d, a, c = typed_edges(ctx, accts, types, rng)
    # half the payments and transfers arrive at the fraudulent account instead of leaving it
    incoming = (rng.random(n) < 0.5) & (types <= 1)
    s2 = s.copy()
    s2[incoming] = d[incoming]
    d[incoming] = accts[incoming]
    return columns(s2, d, a, business_hour_times(ctx, rng, n), c)
