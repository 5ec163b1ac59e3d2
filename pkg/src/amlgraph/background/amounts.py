"""Clipped log-normal amount model.  Samplers return integer minor units."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnknownType


@dataclass(frozen=True)
class AmountModel:
    params: tuple
    structuring_range: tuple = (7000.0, 9999.99)

    @classmethod
    def from_config(cls, cfg, structuring_range=None):
        st = cfg.background.structuring
        return cls(tuple(cfg.amount_params), structuring_range or (st.low, st.high))

    def get(self, txn_type):
        for name, p in self.params:
            if name == txn_type:
                return p
        raise UnknownType(f"no amount parameters for {txn_type!r}")

    def types(self):
        return tuple(name for name, _ in self.params)


def _to_cents(x):
    return np.floor(np.asarray(x, dtype=np.float64) * 100 + 0.5).astype(np.int64)


def lognormal_cents(mu, sigma, lo, hi, z):
    """Map standard normal draws ``z`` to clipped amounts in cents.

    ``mu``, ``sigma``, ``lo`` and ``hi`` may be arrays aligned with ``z``.
    """
    return _to_cents(np.clip(np.exp(mu + sigma * z), lo, hi))


def sample_amount(txn_type, model, rng, size=None):
    """``exp(N(mu, sigma^2))`` clipped to ``[min, max]`` and rounded to cents."""
    p = model.get(txn_type)
    z = rng.standard_normal(size)
    out = lognormal_cents(p.mu, p.sigma, p.min, p.max, z)
    return int(out) if size is None else out


def sample_structuring_amount(model, rng, size=None, low=None, high=None):
    """Uniform over the structuring range, in cents."""
    lo = _to_cents(model.structuring_range[0] if low is None else low)
    hi = _to_cents(model.structuring_range[1] if high is None else high)
    out = rng.integers(lo, hi + 1, size=size)
    return int(out) if size is None else out.astype(np.int64)


def sample_high_value(model, rng, size):
    """High-value amounts rounded to the nearest 100 currency units."""
    p = model.get("high_value")
    x = np.clip(np.exp(p.mu + p.sigma * rng.standard_normal(size)), p.min, p.max)
    hundreds = np.floor(x / 100 + 0.5)
    lo, hi = np.ceil(p.min / 100), np.floor(p.max / 100)
    return (np.clip(hundreds, lo, hi) * 10000).astype(np.int64)


def sample_mixed(types, model, type_names, rng, overlay_share=0.0, overlay_range=None):
    """Amounts for an array of type codes, with an optional structuring overlay.

    ``types`` indexes ``type_names``.  A Bernoulli(``overlay_share``) draw per
    edge replaces the log-normal amount by a uniform structuring amount.
    """
    n = types.shape[0]
    ps = [model.get(t) for t in type_names]
    mu = np.array([p.mu for p in ps])[types]
    sigma = np.array([p.sigma for p in ps])[types]
    lo = np.array([p.min for p in ps])[types]
    hi = np.array([p.max for p in ps])[types]
    out = lognormal_cents(mu, sigma, lo, hi, rng.standard_normal(n))
    if overlay_share > 0:
        mask = rng.random(n) < overlay_share
        k = int(mask.sum())
        if k:
            low, high = overlay_range or model.structuring_range
            out[mask] = sample_structuring_amount(model, rng, size=k, low=low, high=high)
    return out
