"""Legitimate background traffic."""

from .amounts import AmountModel, sample_amount, sample_high_value, sample_structuring_amount
from .baseline import BackgroundContext, build_context, pay_dates
from .budget import BackgroundBudget, BackgroundResult, compute_background_budget, generate_background
from .counter_leakage import KINDS, generate_counter_leakage

__all__ = [
    "AmountModel", "BackgroundBudget", "BackgroundContext", "BackgroundResult", "KINDS",
    "build_context", "compute_background_budget", "generate_background", "generate_counter_leakage",
    "pay_dates", "sample_amount", "sample_high_value", "sample_structuring_amount",
]
