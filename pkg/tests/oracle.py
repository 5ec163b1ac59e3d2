"""Independent reference implementations used to derive expected values.

Nothing here imports the package under test.
"""

import calendar
import datetime as dt
import math


def risk_sum(base, *factor_weights, cap=0.9):
    return min(base + sum(factor_weights), cap)


def inter_arrival(rows):
    """``rows`` are (source, ts) in chronological order."""
    last, out = {}, []
    for s, t in rows:
        out.append(t - last[s] if s in last else 0)
        last[s] = t
    return out


def split_counts(n, train_pct=60, val_pct=20):
    return n * train_pct // 100, n * val_pct // 100, n - n * train_pct // 100 - n * val_pct // 100


def monthly_pay_dates(start, end, pay_day):
    out = []
    d = start
    while d <= end:
        last = calendar.monthrange(d.year, d.month)[1]
        if d.day == min(pay_day, last):
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def lognormal_median(mu):
    return math.exp(mu)


def decayed(amount, factors):
    out = [amount]
    for f in factors:
        out.append(round(out[-1] * f, 2))
    return out
