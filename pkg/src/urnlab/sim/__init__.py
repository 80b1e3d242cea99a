"""Seeded Monte Carlo simulation, cross-checked against the exact core."""

from .engine import (
    Censored,
    Hit,
    InsufficientDataError,
    SimConfig,
    SimSummary,
    run,
    simulate_one,
    tail_slope,
)
from .experiments import (
    beta_limit_check,
    black_fraction_samples,
    exact_median_interval,
    second_black_experiment,
)
from .streams import RandomStream, stream_key

__all__ = [
    "Censored",
    "Hit",
    "InsufficientDataError",
    "RandomStream",
    "SimConfig",
    "SimSummary",
    "beta_limit_check",
    "black_fraction_samples",
    "exact_median_interval",
    "run",
    "second_black_experiment",
    "simulate_one",
    "stream_key",
    "tail_slope",
]
