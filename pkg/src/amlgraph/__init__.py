"""Deterministic generator of labelled synthetic AML transaction graphs."""

__version__ = "0.1.0"
