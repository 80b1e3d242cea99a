"""General white-reinforcement schedules.

After the k-th white draw the ball goes back together with ``a_k >= 1``
extra white balls.  With ``s_k = a_1 + ... + a_k`` (``s_0 = 0``) the first
black draw happens in finite time almost surely exactly when
``sum 1/s_k`` diverges.  When it converges the defect ``P(T = inf)`` is
positive, and :func:`classify` brackets it between

    exp(-b * sum_j 1/(w+s_j))  and  exp(-b * sum_j 1/(b+w+s_j)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from ._arith import fsum_error_bound, product_ratio
from .exact import UrnConfig

__all__ = [
    "AlmostSurelyFinite",
    "Constant",
    "Defective",
    "Explicit",
    "PolynomialFloor",
    "Schedule",
    "classify",
    "defect_bracket",
    "increments",
    "partial_sums",
    "schedule_from_dict",
    "schedule_to_dict",
    "survival_general",
    "survival_general_float",
]

DEFAULT_TERMS = 100_000


@dataclass(frozen=True)
class Constant:
    """a_k = c."""

    c: int

    def __post_init__(self):
        if isinstance(self.c, bool) or not isinstance(self.c, int) or self.c < 1:
            raise ValueError(f"constant schedule needs an integer c >= 1, got {self.c!r}")

    def term(self, k: int) -> int:
        return self.c


@dataclass(frozen=True)
class PolynomialFloor:
    """a_k = max(1, floor(alpha * k**p))."""

    alpha: Fraction
    p: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 0:
            raise ValueError("p must be a nonnegative integer")

    def term(self, k: int) -> int:
        a = self.alpha
        return max(1, (a.numerator * k**self.p) // a.denominator)


TailRule = Union[Constant, PolynomialFloor]


@dataclass(frozen=True)
class Explicit:
    """Given first terms, then ``tail.term(k)`` for the remaining indices k."""

    prefix: tuple[int, ...]
    tail: TailRule

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if any(isinstance(a, bool) or not isinstance(a, int) or a < 1 for a in self.prefix):
            raise ValueError("prefix entries must be integers >= 1")
        if not isinstance(self.tail, (Constant, PolynomialFloor)):
            raise TypeError("tail must be a Constant or PolynomialFloor schedule")

    def term(self, k: int) -> int:
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.tail.term(k)


Schedule = Union[Constant, PolynomialFloor, Explicit]


def increments(s: Schedule, n: int) -> Iterator[int]:
    """a_1, ..., a_n."""
    for k in range(1, n + 1):
        yield s.term(k)


def partial_sums(s: Schedule, n: int) -> list[int]:
    """[s_0, s_1, ..., s_n] with s_0 = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = [0]
    for a in increments(s, n):
        out.append(out[-1] + a)
    return out


def survival_general(cfg: UrnConfig, s: Schedule, n: int) -> Fraction:
    """P(T > n) = prod_{j<n} (w+s_j)/(b+w+s_j), exactly."""
    sums = partial_sums(s, n)[:n]
    b, w = cfg.b, cfg.w
    return product_ratio([w + x for x in sums], [b + w + x for x in sums])


def survival_general_float(cfg: UrnConfig, s: Schedule, n: int) -> float:
    """Floating-point P(T > n) through a compensated sum of log1p terms.

    For horizons where the exact product is too large to form; relative
    error is a few units of 1e-16 times n.
    """
    b, w = cfg.b, cfg.w
    logs = []
    acc = 0
    for j in range(n):
        logs.append(math.log1p(-b / (b + w + acc)))
        acc += s.term(j + 1)
    return math.exp(math.fsum(logs))


def schedule_to_dict(s: Schedule) -> dict:
    if isinstance(s, Constant):
        return {"type": "constant", "c": s.c}
    if isinstance(s, PolynomialFloor):
        return {"type": "poly", "alpha": str(s.alpha), "p": s.p}
    if isinstance(s, Explicit):
        return {"type": "explicit", "prefix": list(s.prefix), "tail": schedule_to_dict(s.tail)}
    raise TypeError(f"not a schedule: {s!r}")


def schedule_from_dict(d: dict) -> Schedule:
    """Inverse of :func:`schedule_to_dict`; raises ValueError on malformed input."""
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("schedule must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "constant":
            return Constant(d["c"])
        if kind == "poly":
            alpha = d["alpha"]
            if isinstance(alpha, float):
                raise ValueError("alpha must be an integer or a rational string like '3/2'")
            return PolynomialFloor(Fraction(alpha), d["p"])
        if kind == "explicit":
            tail = schedule_from_dict(d["tail"])
            if isinstance(tail, Explicit):
                raise ValueError("explicit schedules cannot be nested")
            prefix = d["prefix"]
            if not isinstance(prefix, list):
                raise ValueError("prefix must be a list")
            return Explicit(tuple(prefix), tail)
    except KeyError as exc:
        raise ValueError(f"schedule of type {kind!r} is missing field {exc}") from None
    except (TypeError, ZeroDivisionError) as exc:
        raise ValueError(str(exc)) from None
    raise ValueError(f"unknown schedule type {kind!r}")


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class AlmostSurelyFinite:
    pass


@dataclass(frozen=True)
class Defective:
    """Certified bracket lower <= P(T = inf) <= upper."""

    lower: float
    upper: float
    terms: int

    def __post_init__(self):
        if not 0 < self.lower <= self.upper <= 1:
            raise ValueError(f"invalid defect bracket [{self.lower}, {self.upper}]")


FinitenessVerdict = Union[AlmostSurelyFinite, Defective]


def _tail_rule(s: Schedule) -> TailRule:
    return s.tail if isinstance(s, Explicit) else s


def _grows_linearly(rule: TailRule) -> bool:
    return isinstance(rule, Constant) or rule.p == 0


def classify(cfg: UrnConfig, s: Schedule, terms: int = DEFAULT_TERMS) -> FinitenessVerdict:
    """Decide almost-sure finiteness of T, bracketing the defect when positive.

    Constant tails (and p = 0) give linearly growing s_j, so sum 1/s_j
    diverges.  For p >= 1 the sums over j < J are taken directly and the
    remainder of sum 1/(w+s_j) is bounded by an integral: once
    alpha k^p >= 2 we have a_k >= alpha k^p / 2, hence for j > J

        w + s_j >= c j^(p+1),   c = alpha / (2(p+1)),

    provided w + s_J >= c J^(p+1), which is checked exactly.  The tail is
    then at most 1/(c p J^p).
    """
    rule = _tail_rule(s)
    if _grows_linearly(rule):
        return AlmostSurelyFinite()

    alpha, p = rule.alpha, rule.p
    b, w = cfg.b, cfg.w
    c = alpha / (2 * (p + 1))
    # smallest k with alpha k^p >= 2
    k0 = 1
    while alpha * k0**p < 2:
        k0 *= 2
    n_terms = max(terms, k0, len(s.prefix) if isinstance(s, Explicit) else 0, 1)

    upper_terms: list[float] = []
    lower_terms: list[float] = []
    acc = 0
    j = 0
    while True:
        while j <= n_terms:
            upper_terms.append(1.0 / float(w + acc))
            lower_terms.append(1.0 / float(b + w + acc))
            j += 1
            acc += s.term(j)
        # acc is now s_{n_terms + 1}; the check needs s_{n_terms}
        s_last = acc - s.term(j)
        if w + s_last >= c * n_terms ** (p + 1):
            break
        n_terms *= 2

    head_u, err_u = fsum_error_bound(upper_terms, ops_per_term=2)
    head_l, err_l = fsum_error_bound(lower_terms, ops_per_term=2)
    tail = Fraction(1) / (c * p * Fraction(n_terms) ** p)
    big_u = head_u + err_u + math.nextafter(float(tail), math.inf)
    big_l = head_l - err_l

    u = 2.0**-53
    lower = math.exp(-b * big_u * (1 + 2 * u)) * (1 - 4 * u)
    upper = min(1.0, math.exp(-b * big_l * (1 - 2 * u)) * (1 + 4 * u))
    return Defective(lower=lower, upper=upper, terms=n_terms)


def defect_bracket(
    cfg: UrnConfig, s: Schedule, n: int, terms: int = DEFAULT_TERMS
) -> tuple[Fraction, float]:
    """(P(T > n) exactly, certified lower bound on P(T = inf)).

    P(T > n) decreases to the defect, so it is an upper bound for every n.
    """
    verdict = classify(cfg, s, terms=terms)
    if isinstance(verdict, AlmostSurelyFinite):
        raise ValueError("schedule is almost surely finite; there is no defect to bracket")
    return survival_general(cfg, s, n), verdict.lower
