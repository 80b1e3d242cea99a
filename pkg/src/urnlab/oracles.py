"""Independent reference computations.

Nothing in here is used by the analytic modules.  These routes exist so that
the closed forms can be checked against something that does not share their
derivation: brute-force path enumeration over the urn's draw tree, and
truncated moment series with rigorous tail enclosures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as cartesian

import numpy as np

__all__ = [
    "count_by_enumeration",
    "first_black_by_enumeration",
    "moment_partial_sum",
    "truncated_moment_interval",
    "certified_moment",
]


def _path_probability(b: int, w: int, colors) -> Fraction:
    """Exact probability of one colour sequence (1 = black) in the classical urn."""
    p = Fraction(1)
    for c in colors:
        total = b + w
        if c:
            p *= Fraction(b, total)
            b += 1
        else:
            p *= Fraction(w, total)
            w += 1
    return p


def count_by_enumeration(b: int, w: int, n: int) -> list[Fraction]:
    """Law of the number of black draws in n classical draws, over all 2^n paths."""
    out = [Fraction(0)] * (n + 1)
    for colors in cartesian((0, 1), repeat=n):
        out[sum(colors)] += _path_probability(b, w, colors)
    return out


def first_black_by_enumeration(b: int, w: int, n: int) -> Fraction:
    """P(first black at draw n), summing every length-n path whose first black is last.

    Before the first black only white balls are added, so the classical urn
    and the waiting-time urn agree on these paths.
    """
    total = Fraction(0)
    for colors in cartesian((0, 1), repeat=n):
        if colors[-1] == 1 and not any(colors[:-1]):
            total += _path_probability(b, w, colors)
    return total


# ---------------------------------------------------------------------------
# truncated moment series


def _weight(b: int, w: int) -> int:
    # P(T > n) = C / ((w+n)...(w+n+b-1)) with C = (b+w-1)!/(w-1)!
    return math.prod(range(w, b + w))


def _terms(b: int, w: int, r: int, lo: int, hi: int) -> np.ndarray:
    """Float values of n^r P(T = n) for lo <= n < hi."""
    n = np.arange(lo, hi, dtype=np.float64)
    num = n.copy()
    for _ in range(r - 1):
        num *= n
    den = n + (w - 1)
    for i in range(1, b + 1):
        den *= n + (w - 1 + i)
    return float(_weight(b, w) * b) * (num / den)


_CHUNK = 1 << 20


def moment_partial_sum(b: int, w: int, r: int, n_terms: int) -> float:
    """Plain float sum of n^r P(T = n) over n = 1..n_terms (no certification)."""
    total = 0.0
    for lo in range(1, n_terms + 1, _CHUNK):
        hi = min(lo + _CHUNK, n_terms + 1)
        total += float(np.sum(_terms(b, w, r, lo, hi)))
    return total


class _RunningSum:
    def __init__(self, b: int, w: int, r: int):
        self.b, self.w, self.r = b, w, r
        self.n = 0
        self._chunks: list[float] = []

    def extend(self, n_terms: int) -> None:
        while self.n < n_terms:
            lo = self.n + 1
            hi = min(lo + _CHUNK, n_terms + 1)
            self._chunks.append(float(np.sum(_terms(self.b, self.w, self.r, lo, hi))))
            self.n = hi - 1

    def value(self) -> tuple[float, float]:
        total = math.fsum(self._chunks)
        # per-term roundings: r-1 powers, b products, divide, scale, weight
        ops = self.r + self.b + 3
        # pairwise summation inside a chunk plus the final fsum
        ops += 2 + int(math.log2(_CHUNK)) + 8
        return total, 1.01 * ops * 2.0**-53 * total


def _tail_bounds(b: int, w: int, r: int, n_terms: int) -> tuple[Fraction, Fraction]:
    """Exact enclosure of sum_{n > N} n^r P(T = n), valid for b > r."""
    big_c = _weight(b, w) * b
    m = b - r
    k = w - 1 + b
    n = n_terms
    # n^r / prod_{i=0}^{b} (n+w-1+i) <= n^(r-b-1); integrate from N
    upper = Fraction(big_c, m) / Fraction(n) ** m
    # ... >= (N/(N+K))^r (n+K)^(r-b-1); integrate from N+1
    lower = Fraction(big_c, m) * Fraction(n, n + k) ** r / Fraction(n + 1 + k) ** m
    return lower, upper


def truncated_moment_interval(b: int, w: int, r: int, n_terms: int) -> tuple[float, float]:
    """Certified float interval containing E[T^r] for the unit rule (b > r)."""
    if b <= r:
        raise ValueError("the moment diverges for b <= r")
    acc = _RunningSum(b, w, r)
    acc.extend(n_terms)
    return _interval(acc, n_terms)


def _interval(acc: _RunningSum, n_terms: int) -> tuple[float, float]:
    total, err = acc.value()
    t_lo, t_hi = _tail_bounds(acc.b, acc.w, acc.r, n_terms)
    lo = math.nextafter(total - err + float(t_lo) * (1 - 2.0**-52), -math.inf)
    hi = math.nextafter(total + err + float(t_hi) * (1 + 2.0**-52), math.inf)
    return lo, hi


def certified_moment(
    b: int, w: int, r: int, rel_width: float = 1e-11, max_terms: int = 1 << 27
) -> tuple[float, float, int]:
    """Grow the truncation point until the enclosure is relatively narrower than rel_width.

    Returns (lo, hi, N).  Raises RuntimeError if max_terms is reached first.
    """
    if b <= r:
        raise ValueError("the moment diverges for b <= r")
    acc = _RunningSum(b, w, r)
    n = 1024
    while True:
        acc.extend(n)
        lo, hi = _interval(acc, n)
        if hi - lo <= rel_width * lo:
            return lo, hi, n
        if n >= max_terms:
            raise RuntimeError(f"no {rel_width:g} enclosure within {max_terms} terms")
        # the enclosure width shrinks like N^(r-b-1)
        shrink = ((hi - lo) / (rel_width * lo)) ** (1.0 / (b - r + 1))
        n = min(max_terms, max(2 * n, int(n * shrink * 1.1) + 1))
