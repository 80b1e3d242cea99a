"""Big-integer helpers shared by the exact modules.

Fractions built from long products are assembled by binary splitting and
reduced once with GMP, because CPython's gcd is quadratic in the operand
size and becomes the bottleneck past a few hundred thousand digits.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2


def coprime_fraction(p: int, q: int) -> Fraction:
    """Wrap an already-reduced pair without a second gcd pass."""
    if q <= 0:
        raise ValueError("denominator must be positive")
    from_coprime = getattr(Fraction, "_from_coprime_ints", None)
    if from_coprime is not None:  # Python >= 3.12
        return from_coprime(p, q)
    try:
        return Fraction(p, q, _normalize=False)
    except TypeError:  # pragma: no cover - unknown interpreter
        return Fraction(p, q)


def reduce_fraction(p, q) -> Fraction:
    """Canonical Fraction from arbitrary (possibly gmpy2) integers."""
    p = gmpy2.mpz(p)
    q = gmpy2.mpz(q)
    if q == 0:
        raise ZeroDivisionError("zero denominator")
    if q < 0:
        p, q = -p, -q
    g = gmpy2.gcd(p, q)
    if g != 1:
        p //= g
        q //= g
    return coprime_fraction(int(p), int(q))


def product(values: Sequence[int]) -> gmpy2.mpz:
    """Product of a sequence by balanced binary splitting."""
    if not values:
        return gmpy2.mpz(1)

    def rec(lo: int, hi: int):
        if hi - lo <= 8:
            acc = gmpy2.mpz(1)
            for v in values[lo:hi]:
                acc *= v
            return acc
        mid = (lo + hi) // 2
        return rec(lo, mid) * rec(mid, hi)

    return rec(0, len(values))


def product_ratio(nums: Sequence[int], dens: Sequence[int]) -> Fraction:
    """Exact reduced value of prod(nums) / prod(dens)."""
    return reduce_fraction(product(nums), product(dens))


def rising(x: int, m: int) -> int:
    """Rising factorial x (x+1) ... (x+m-1); equals 1 for m = 0."""
    if m < 0:
        raise ValueError("length must be nonnegative")
    return int(product(range(x, x + m)))


def reciprocal_sum(lo: int, hi: int, term: Callable[[int], int] = lambda j: j) -> Fraction:
    """Exact sum of 1/term(j) for lo <= j < hi, by binary splitting."""
    if hi <= lo:
        return Fraction(0)

    def rec(a: int, c: int):
        if c - a == 1:
            return gmpy2.mpz(1), gmpy2.mpz(term(a))
        mid = (a + c) // 2
        p1, q1 = rec(a, mid)
        p2, q2 = rec(mid, c)
        return p1 * q2 + p2 * q1, q1 * q2

    p, q = rec(lo, hi)
    return reduce_fraction(p, q)


def format_rational(x: Fraction) -> str:
    """Serialize as "p/q" (always with a slash), without digit-count limits."""
    return f"{gmpy2.mpz(x.numerator).digits(10)}/{gmpy2.mpz(x.denominator).digits(10)}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`format_rational`; also accepts a bare integer."""
    num, _, den = text.strip().partition("/")
    return reduce_fraction(gmpy2.mpz(num), gmpy2.mpz(den or "1"))


def fsum_error_bound(terms: Iterable[float], ops_per_term: int) -> tuple[float, float]:
    """fsum of positive float terms and a rigorous absolute error bound.

    Each term is assumed to carry at most ``ops_per_term`` roundings relative
    to its exact value; fsum adds one more rounding of the total.
    """
    import math

    terms = list(terms)
    total = math.fsum(terms)
    u = 2.0**-53
    rel = 1.01 * (ops_per_term + 1) * u
    return total, rel * total + 2.0**-1074
