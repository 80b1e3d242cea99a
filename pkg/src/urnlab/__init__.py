"""Exact analytics and simulation for first-black waiting times in Polya's urn."""

from .exact import (
    INF,
    MomentReport,
    PositiveInfinity,
    UrnConfig,
    conditional_expectation_T11,
    expectation,
    pmf,
    prob_odd_T11,
    raw_moment,
    survival,
    variance,
)
from .polya import beta_binomial_pmf, count_distribution, martingale_step_check, polya_pmf
from .schedule import (
    AlmostSurelyFinite,
    Constant,
    Defective,
    Explicit,
    PolynomialFloor,
    classify,
    defect_bracket,
    partial_sums,
    survival_general,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AlmostSurelyFinite",
    "Constant",
    "Defective",
    "Explicit",
    "MomentReport",
    "PolynomialFloor",
    "PositiveInfinity",
    "UrnConfig",
    "beta_binomial_pmf",
    "classify",
    "conditional_expectation_T11",
    "count_distribution",
    "defect_bracket",
    "expectation",
    "martingale_step_check",
    "partial_sums",
    "pmf",
    "polya_pmf",
    "prob_odd_T11",
    "raw_moment",
    "survival",
    "survival_general",
    "variance",
]
