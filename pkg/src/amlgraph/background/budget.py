"""Background edge budget and the background generation driver."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidRatio
from ..rng import BACKGROUND, substream
from .baseline import (
    build_context,
    calibrated_weights,
    empty_columns,
    fraudster_count,
    generate_fraudster_background,
    generate_high_value,
    generate_salaries,
    random_payments,
    type_counts,
)
from .counter_leakage import KINDS, generate_counter_leakage

log = logging.getLogger(__name__)

# substream ids under the background stage
_S_CONTEXT, _S_RANDOM, _S_SALARY, _S_HIGH, _S_FRAUDSTER = 0, 1, 2, 3, 4
_S_KIND0 = 10


@dataclass
class BackgroundBudget:
    total_target_edges: int
    allocations: dict
    effective_daily_rate: float
    target_ratio: float
    achievable_ratio: float
    capped: bool = False
    warnings: list = field(default_factory=list)


def _split(bg, allocation):
    """Integer shares of ``bg`` per allocation key; counter-leakage splits evenly over kinds."""
    total_w = sum(w for _, w in allocation)
    share = {k: w / total_w for k, w in allocation}
    out = {
        "salaries": int(math.floor(bg * share["salaries"])),
        "high_value": int(math.floor(bg * share["high_value"])),
    }
    cl = int(math.floor(bg * share["counter_leakage"]))
    for kind in KINDS:
        out[f"counter_leakage.{kind}"] = cl // len(KINDS)
    return out, share["random"]


def compute_background_budget(target_ratio, fraud_edges, n_accounts, days, cap=2.0,
                              allocation=(("random", 0.8), ("salaries", 0.08), ("high_value", 0.02),
                                          ("counter_leakage", 0.10)),
                              n_fraud_accounts=0, fallback_daily_rate=0.5):
    """Size every background generator so that fraud / total hits ``target_ratio``.

    The random-payment generator absorbs the exact remainder; if that needs a
    daily rate above ``cap`` it is shrunk to the cap and the achievable ratio
    is reported instead.
    """
    if not 0 < target_ratio < 1:
        raise InvalidRatio(f"target ratio {target_ratio} outside (0, 1)")
    warnings = []
    denom = max(days * n_accounts, 1)
    if fraud_edges <= 0:
        rate = min(fallback_daily_rate, cap)
        n_random = int(math.floor(rate * days * n_accounts))
        _, random_share = _split(0, allocation)
        bg = int(round(n_random / random_share)) if random_share > 0 else n_random
        alloc, _ = _split(bg, allocation)
        alloc["fraudster"] = 0
        alloc["random"] = n_random
        warnings.append("no fraud edges: background sized from the fallback daily rate")
        total = sum(alloc.values())
        return BackgroundBudget(total, alloc, rate, target_ratio, 0.0, False, warnings)

    total = int(round(fraud_edges / target_ratio))
    bg = total - fraud_edges
    alloc, random_share = _split(bg, allocation)
    r0 = min(bg * random_share / denom, cap)
    alloc["fraudster"] = n_fraud_accounts * fraudster_count(r0, days)
    alloc["random"] = max(bg - sum(alloc.values()), 0)
    rate = alloc["random"] / denom
    capped = False
    if rate > cap:
        capped = True
        alloc["random"] = int(math.floor(cap * days * n_accounts))
        rate = alloc["random"] / denom
    achieved = fraud_edges / (fraud_edges + sum(alloc.values()))
    if capped:
        msg = (f"daily rate cap {cap} binds: target ratio {target_ratio} unreachable, "
               f"achievable ratio {achieved:.6f}")
        log.warning(msg)
        warnings.append(msg)
    return BackgroundBudget(fraud_edges + sum(alloc.values()), alloc, rate, target_ratio, achieved, capped, warnings)


@dataclass
class BackgroundResult:
    parts: list
    budget: BackgroundBudget
    counts: dict
    mix_ratios: dict
    context: object = None


def generate_background(graph, cfg, fraud_edges, master_seed, threads=1):
    """Generate all background edges for a fraud-labelled graph.

    Each generator draws from its own substream, so the output does not depend
    on ``threads``.  Parts are returned in a fixed order.
    """
    ctx = build_context(graph, cfg, substream(master_seed, BACKGROUND, _S_CONTEXT))
    bgp = cfg.background
    budget = compute_background_budget(
        cfg.target_illicit_ratio, fraud_edges, ctx.active_accounts.size, cfg.days,
        cap=cfg.per_account_daily_rate_cap, allocation=bgp.allocation,
        n_fraud_accounts=ctx.fraud_accounts.size, fallback_daily_rate=bgp.fallback_daily_rate,
    )
    a = budget.allocations
    r_monthly = a["high_value"] / (cfg.months * ctx.high_value_accounts.size) if ctx.high_value_accounts.size else 0
    fraud_rate = min(budget.effective_daily_rate, cfg.per_account_daily_rate_cap)
    if fraud_edges > 0 and ctx.fraud_accounts.size:
        fraud_rate = a["fraudster"] / ctx.fraud_accounts.size / cfg.days

    jobs = [
        ("salaries", lambda: generate_salaries(ctx, bgp.salary, cfg.simulation_start, cfg.simulation_end,
                                               substream(master_seed, BACKGROUND, _S_SALARY), a["salaries"])),
        ("high_value", lambda: generate_high_value(ctx, r_monthly, cfg.months,
                                                   substream(master_seed, BACKGROUND, _S_HIGH))),
        ("fraudster", lambda: generate_fraudster_background(ctx, fraud_rate, cfg.days,
                                                            substream(master_seed, BACKGROUND, _S_FRAUDSTER))),
    ]
    for k, kind in enumerate(KINDS):
        jobs.append((kind, (lambda kind=kind, k=k: generate_counter_leakage(
            ctx, kind, bgp.counter_leakage, a[f"counter_leakage.{kind}"],
            substream(master_seed, BACKGROUND, _S_KIND0 + k)))))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: job[1](), jobs))
    else:
        results = [job[1]() for job in jobs]

    parts, counts, mix = [], {}, {}
    for (name, _), res in zip(jobs, results):
        if isinstance(res, tuple):
            res, mix[name] = res
        res["ts"] = np.minimum(res["ts"], cfg.end_ts)
        parts.append((name, res))
        counts[name] = len(res["src"])

    # random payments absorb whatever the other generators under- or overshot
    n_random = max(budget.allocations["random"], 0)
    if fraud_edges > 0:
        total_bg = budget.total_target_edges - fraud_edges
        n_random = total_bg - sum(counts.values())
        cap_n = int(math.floor(cfg.per_account_daily_rate_cap * cfg.days * ctx.active_accounts.size))
        if n_random > cap_n:
            n_random = cap_n
        n_random = max(n_random, 0)
    weights = None
    if bgp.type_calibration == "dataset":
        other = sum((type_counts(part["category"]) for _, part in parts), np.zeros(4, dtype=np.int64))
        weights = calibrated_weights(ctx.type_weights, other, n_random)
    rnd = random_payments(ctx, n_random, substream(master_seed, BACKGROUND, _S_RANDOM), weights)
    parts.insert(0, ("random", rnd))
    counts = {"random": n_random, **counts}
    total = fraud_edges + sum(counts.values())
    budget.achievable_ratio = fraud_edges / total if total else 0.0
    budget.effective_daily_rate = n_random / max(cfg.days * ctx.active_accounts.size, 1)
    return BackgroundResult(parts, budget, counts, mix, ctx)


__all__ = ["BackgroundBudget", "BackgroundResult", "compute_background_budget", "generate_background",
           "empty_columns"]
