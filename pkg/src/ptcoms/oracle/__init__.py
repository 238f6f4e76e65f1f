"""Numerical oracles that check the analytic sideband formula independently."""

from .harmonic import HarmonicSolution, harmonic_balance
from .timedomain import TimeTrace, integrate_time_domain
from .validation import ValidationReport, cross_validate

__all__ = [
    "HarmonicSolution",
    "TimeTrace",
    "ValidationReport",
    "cross_validate",
    "harmonic_balance",
    "integrate_time_domain",
]
