"""Black-draw counts in the classical urn and their beta-binomial form.

In the classical scheme every drawn ball goes back with one more ball of its
own colour.  ``B_n`` counts black draws among the first ``n``; the black
fraction ``X_n = (b + B_n) / (b + w + n)`` is a martingale.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._arith import format_rational, rising
from .exact import UrnConfig, beta_int

__all__ = [
    "PolyaCountDist",
    "ProportionState",
    "beta_binomial_pmf",
    "count_distribution",
    "martingale_step_check",
    "polya_pmf",
]


def _check_k(n: int, k: int) -> None:
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")


def polya_pmf(cfg: UrnConfig, n: int, k: int) -> Fraction:
    """P(B_n = k) = C(n,k) b^(k) w^(n-k) / (b+w)^(n), rising factorials.

    The white product has n-k factors; with n-k+1 factors the row would not
    sum to one.
    """
    _check_k(n, k)
    b, w = cfg.b, cfg.w
    return Fraction(math.comb(n, k) * rising(b, k) * rising(w, n - k), rising(b + w, n))


def beta_binomial_pmf(u: int, v: int, n: int, k: int) -> Fraction:
    """C(n,k) B(u+k, v+n-k) / B(u, v) for positive integer u, v."""
    _check_k(n, k)
    if u < 1 or v < 1:
        raise ValueError("u and v must be positive integers")
    return math.comb(n, k) * beta_int(u + k, v + n - k) / beta_int(u, v)


@dataclass(frozen=True)
class PolyaCountDist:
    cfg: UrnConfig
    n: int
    pmf_table: tuple[Fraction, ...] = field(repr=False)

    def mean(self) -> Fraction:
        return sum((k * p for k, p in enumerate(self.pmf_table)), Fraction(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "numerator", "denominator", "float"])
        for k, p in enumerate(self.pmf_table):
            writer.writerow([k, p.numerator, p.denominator, repr(float(p))])
        return buf.getvalue()

    def rows(self) -> list[dict]:
        return [
            {"k": k, "value": format_rational(p), "float": float(p)}
            for k, p in enumerate(self.pmf_table)
        ]


def count_distribution(cfg: UrnConfig, n: int) -> PolyaCountDist:
    """Full table of P(B_n = k), k = 0..n."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return PolyaCountDist(cfg, n, tuple(polya_pmf(cfg, n, k) for k in range(n + 1)))


@dataclass(frozen=True)
class ProportionState:
    """Urn after ``n`` draws of which ``k`` were black."""

    cfg: UrnConfig
    n: int
    k: int

    def __post_init__(self):
        _check_k(self.n, self.k)

    @property
    def value(self) -> Fraction:
        return Fraction(self.cfg.b + self.k, self.cfg.b + self.cfg.w + self.n)

    def successors(self) -> list[tuple[Fraction, "ProportionState"]]:
        """(probability, next state) for the black and the white draw."""
        p_black = self.value
        return [
            (p_black, ProportionState(self.cfg, self.n + 1, self.k + 1)),
            (1 - p_black, ProportionState(self.cfg, self.n + 1, self.k)),
        ]


def martingale_step_check(cfg: UrnConfig, n: int, k: int) -> tuple[Fraction, Fraction]:
    """(E[X_{n+1} | B_n = k], X_n) evaluated exactly; the two must coincide."""
    state = ProportionState(cfg, n, k)
    lhs = sum((p * nxt.value for p, nxt in state.successors()), Fraction(0))
    return lhs, state.value
