"""Explicit bounds for universal sums of generalized heptagonal numbers."""

__version__ = "0.1.0"
