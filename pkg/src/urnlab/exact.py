"""Exact law of the first-black waiting time under the unit replacement rule.

Starting from ``b`` black and ``w`` white balls, every white draw is returned
together with one extra white ball; ``T`` is the index of the first black
draw.  All results are :class:`fractions.Fraction` values, or :data:`INF`
where the quantity diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from ._arith import format_rational, product_ratio, reciprocal_sum, rising

__all__ = [
    "INF",
    "MAX_COUNT",
    "Extended",
    "MomentReport",
    "PositiveInfinity",
    "UrnConfig",
    "beta_int",
    "beta_ratio",
    "conditional_expectation_T11",
    "eulerian_row",
    "expectation",
    "is_finite",
    "pmf",
    "prob_odd_T11",
    "raw_moment",
    "survival",
    "survival_factorial",
    "variance",
]

MAX_COUNT = 2**63 - 1
EULER_GAMMA = 0.57721566490153286061


def _check_count(name: str, value, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < minimum or value > MAX_COUNT:
        raise ValueError(f"{name} must be in [{minimum}, 2**63-1], got {value}")
    return value


@dataclass(frozen=True)
class UrnConfig:
    """Initial urn content: ``b`` black and ``w`` white balls."""

    b: int
    w: int

    def __post_init__(self):
        _check_count("b", self.b)
        _check_count("w", self.w)


class PositiveInfinity:
    """The single divergent value; compares greater than every Fraction."""

    _instance: Optional["PositiveInfinity"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __float__(self):
        return math.inf

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __reduce__(self):
        return (PositiveInfinity, ())


INF = PositiveInfinity()
Extended = Union[Fraction, PositiveInfinity]


def is_finite(x: Extended) -> bool:
    return x is not INF


def render(x: Extended) -> str:
    """``"p/q"`` for finite values, ``"inf"`` otherwise."""
    return "inf" if x is INF else format_rational(x)


@dataclass(frozen=True)
class MomentReport:
    order: int
    finite: bool
    value: Optional[Fraction] = None

    def __post_init__(self):
        if self.finite != (self.value is not None):
            raise ValueError("value must be present exactly when the moment is finite")


# ---------------------------------------------------------------------------
# distribution


def survival(cfg: UrnConfig, n: int) -> Fraction:
    """P(T > n): the first ``n`` draws are all white.

    The product of ``(w+i)/(b+w+i)`` over i < n telescopes to the product
    of ``(w+i)/(w+n+i)`` over i < b, so only min(n, b) factors are needed.
    """
    _check_count("n", n, minimum=0)
    b, w = cfg.b, cfg.w
    if n <= b:
        nums, dens = range(w, w + n), range(b + w, b + w + n)
    else:
        nums, dens = range(w, w + b), range(w + n, w + n + b)
    if len(nums) > 64:
        return product_ratio(nums, dens)
    acc = Fraction(1)
    for p, q in zip(nums, dens):
        acc *= Fraction(p, q)
    return acc


def survival_factorial(cfg: UrnConfig, n: int) -> Fraction:
    """Factorial-quotient form of :func:`survival`; a differential twin.

    Only usable for moderate ``w`` since it materializes ``(w+n)!``.
    """
    _check_count("n", n, minimum=0)
    b, w = cfg.b, cfg.w
    f = math.factorial
    return Fraction(f(b + w - 1) * f(w - 1 + n), f(w - 1) * f(b + w - 1 + n))


def pmf(cfg: UrnConfig, n: int) -> Fraction:
    """P(T = n) for n >= 1."""
    _check_count("n", n, minimum=1)
    return survival(cfg, n - 1) * Fraction(cfg.b, cfg.b + cfg.w + n - 1)


# ---------------------------------------------------------------------------
# moments


def expectation(cfg: UrnConfig) -> Extended:
    if cfg.b == 1:
        return INF
    return Fraction(cfg.b + cfg.w - 1, cfg.b - 1)


def variance(cfg: UrnConfig) -> Extended:
    b, w = cfg.b, cfg.w
    if b <= 2:
        return INF
    return Fraction(b * w * (b + w - 1), (b - 1) ** 2 * (b - 2))


@lru_cache(maxsize=None)
def eulerian_row(r: int) -> tuple[int, ...]:
    """Eulerian numbers <r, j> for j = 0..r-1 (r >= 1)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return (1,)
    prev = eulerian_row(r - 1)
    row = []
    for j in range(r):
        left = (j + 1) * prev[j] if j < r - 1 else 0
        right = (r - j) * prev[j - 1] if j >= 1 else 0
        row.append(left + right)
    return tuple(row)


def beta_int(u: int, v: int) -> Fraction:
    """Beta function at positive integers: (u-1)!(v-1)!/(u+v-1)!."""
    if u < 1 or v < 1:
        raise ValueError("beta_int needs positive integer arguments")
    f = math.factorial
    return Fraction(f(u - 1) * f(v - 1), f(u + v - 1))


def _factorial_ratio(a: int, c: int) -> Fraction:
    """a! / c! without forming either factorial."""
    if a >= c:
        return Fraction(rising(c + 1, a - c))
    return Fraction(1, rising(a + 1, c - a))


def beta_ratio(u1: int, v1: int, u2: int, v2: int) -> Fraction:
    """B(u1, v1) / B(u2, v2) at positive integers, safe for huge arguments."""
    if min(u1, v1, u2, v2) < 1:
        raise ValueError("beta_ratio needs positive integer arguments")
    return (
        _factorial_ratio(u1 - 1, u2 - 1)
        * _factorial_ratio(v1 - 1, v2 - 1)
        * _factorial_ratio(u2 + v2 - 1, u1 + v1 - 1)
    )


def raw_moment(cfg: UrnConfig, r: int) -> MomentReport:
    """E[T^r], finite exactly when b > r.

    Given the Beta-distributed limiting black fraction P = p, T is geometric
    and E[T^r | p] = A_r(1-p) / p^r with A_r the Eulerian polynomial.
    Integrating each monomial (1-p)^j p^-r against the Beta(b, w) density
    gives B(b-r, w+j) / B(b, w).
    """
    _check_count("r", r, minimum=1)
    b, w = cfg.b, cfg.w
    if b <= r:
        return MomentReport(order=r, finite=False)
    total = sum(
        (coef * beta_ratio(b - r, w + j, b, w) for j, coef in enumerate(eulerian_row(r))),
        Fraction(0),
    )
    return MomentReport(order=r, finite=True, value=total)


# ---------------------------------------------------------------------------
# the b = w = 1 curiosities


def conditional_expectation_T11(k: int) -> Fraction:
    """E[T | T <= k] for b = w = 1, equal to ((k+1)/k) * sum_{j=1..k} 1/(j+1)."""
    _check_count("k", k, minimum=1)
    return Fraction(k + 1, k) * reciprocal_sum(2, k + 2)


def prob_odd_T11(tol: float) -> tuple[float, float]:
    """Certified bracket [lo, hi] for P(T odd) when b = w = 1, of width <= tol.

    The odd-value probability telescopes to the alternating harmonic series.
    Its terms 1/j are decreasing and convex, so the remainder after N terms
    has sign (-1)^N and magnitude between 1/(2(N+1)) and 1/(2N).  The partial
    sum is evaluated with fsum and widened by its rounding-error bound.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    u = 2.0**-53
    # rounding slack grows like log N; below this no N can meet tol
    if tol < 1e-13:
        raise ValueError("tol below floating-point resolution (minimum 1e-13)")
    n = max(1, math.ceil(math.sqrt(1.0 / (2.0 * tol))) - 1)
    while True:
        slack = 1.01 * u * (math.log(n) + 2.0) + 4 * u
        if 1.0 / (2.0 * n * (n + 1)) + 2.0 * slack <= tol:
            break
        n += max(1, n // 64)
    partial = math.fsum((1.0 if j % 2 else -1.0) / j for j in range(1, n + 1))
    near, far = 1.0 / (2.0 * (n + 1)), 1.0 / (2.0 * n)
    if n % 2 == 0:
        lo, hi = partial + near, partial + far
    else:
        lo, hi = partial - far, partial - near
    return math.nextafter(lo - slack, -math.inf), math.nextafter(hi + slack, math.inf)

