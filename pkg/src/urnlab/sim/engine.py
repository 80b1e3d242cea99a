"""Monte Carlo runs of the first-black waiting time under any schedule."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from ..exact import UrnConfig
from ..schedule import Constant, Explicit, PolynomialFloor, Schedule, schedule_to_dict
from . import _kernels
from .streams import MASK, RandomStream

__all__ = [
    "BLOCK",
    "Censored",
    "Hit",
    "InsufficientDataError",
    "SimConfig",
    "SimSummary",
    "default_threads",
    "moment_status",
    "run",
    "simulate_one",
    "tail_slope",
    "thresholds",
]

# replications per work unit; fixed so that results never depend on threads
BLOCK = 1 << 16


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class Hit:
    n: int


@dataclass(frozen=True)
class Censored:
    cap: int


Outcome = Union[Hit, Censored]


def _threshold(b: int, w: int, s: int) -> float:
    # int / int is correctly rounded, matching the float64 kernels
    return b / (b + w + s)


def simulate_one(cfg: UrnConfig, schedule: Schedule, cap: int, stream: RandomStream) -> Outcome:
    """One replication, drawing one uniform per step from ``stream``."""
    b, w = cfg.b, cfg.w
    s = 0
    for k in range(1, cap + 1):
        if stream.uniform() < _threshold(b, w, s):
            return Hit(k)
        s += schedule.term(k)
    return Censored(cap)


def thresholds(cfg: UrnConfig, schedule: Schedule, cap: int) -> np.ndarray:
    """Black-draw probabilities b/(b+w+s_{k-1}) for k = 1..cap, as float64."""
    b, w = cfg.b, cfg.w
    if isinstance(schedule, Constant) and b + w + schedule.c * cap < 2**53:
        totals = (b + w) + schedule.c * np.arange(cap, dtype=np.float64)
        return b / totals
    out = np.empty(cap, dtype=np.float64)
    s = 0
    for k in range(cap):
        out[k] = _threshold(b, w, s)
        s += schedule.term(k + 1)
    return out


def default_threads() -> int:
    env = os.environ.get("URNLAB_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"URNLAB_THREADS must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"URNLAB_THREADS must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def moment_status(cfg: UrnConfig, schedule: Schedule) -> tuple[bool, bool]:
    """(mean finite, variance finite) as known from theory.

    With a constant tail increment c, P(T > n) decays like n^(-b/c), so the
    r-th moment is finite iff b > r c.  Faster-growing tails leave a positive
    probability of never drawing black, making every moment infinite.
    """
    rule = schedule.tail if isinstance(schedule, Explicit) else schedule
    if isinstance(rule, PolynomialFloor):
        if rule.p >= 1:
            return False, False
        c = max(1, math.floor(rule.alpha))
    else:
        c = rule.c
    return cfg.b > c, cfg.b > 2 * c


@dataclass(frozen=True)
class SimConfig:
    cfg: UrnConfig
    schedule: Schedule
    replications: int
    cap: int
    master_seed: int
    survival_grid: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "survival_grid", tuple(sorted(set(self.survival_grid))))
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if not 0 <= self.master_seed <= MASK:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if any(n < 1 for n in self.survival_grid):
            raise ValueError("survival grid points must be positive")
        if self.survival_grid and self.cap < self.survival_grid[-1]:
            raise ValueError("cap must be at least the largest survival grid point")


@dataclass(frozen=True)
class SimSummary:
    """Merged statistics over replications ``start .. start+replications-1``.

    Sums of hit times and squared hit times are kept as Python integers, so
    merging is exact, commutative and associative.
    """

    config: SimConfig
    start: int
    replications: int
    hits: int
    censored: int
    hit_sum: int
    hit_sum_sq: int
    survivors: tuple[int, ...]  # count of T > n for each grid point
    tail_slope: Optional[float] = field(default=None, compare=False)

    @property
    def grid(self) -> tuple[int, ...]:
        return self.config.survival_grid

    @property
    def empirical_survival(self) -> dict[int, float]:
        return {n: c / self.replications for n, c in zip(self.grid, self.survivors)}

    @property
    def uncensored_mean(self) -> float:
        return self.hit_sum / self.hits if self.hits else math.nan

    @property
    def uncensored_m2(self) -> float:
        """Sum of squared deviations of the hit times from their mean."""
        if not self.hits:
            return math.nan
        return float(self.hit_sum_sq - Fraction(self.hit_sum**2, self.hits))

    @property
    def uncensored_variance(self) -> float:
        return self.uncensored_m2 / (self.hits - 1) if self.hits > 1 else math.nan

    @property
    def mean_finite(self) -> bool:
        return moment_status(self.config.cfg, self.config.schedule)[0]

    @property
    def variance_finite(self) -> bool:
        return moment_status(self.config.cfg, self.config.schedule)[1]

    @property
    def mean_se(self) -> Optional[float]:
        """CLT standard error of the mean, only where the variance is finite."""
        if not (self.mean_finite and self.variance_finite) or self.hits < 2:
            return None
        return math.sqrt(self.uncensored_variance / self.hits)

    def merge(self, other: "SimSummary") -> "SimSummary":
        """Combine summaries of adjacent replication ranges."""
        if self.config != other.config:
            raise ValueError("cannot merge summaries of different configurations")
        first, second = sorted((self, other), key=lambda s: s.start)
        if first.start + first.replications != second.start:
            raise ValueError("replication ranges must be adjacent")
        return SimSummary(
            config=self.config,
            start=first.start,
            replications=first.replications + second.replications,
            hits=first.hits + second.hits,
            censored=first.censored + second.censored,
            hit_sum=first.hit_sum + second.hit_sum,
            hit_sum_sq=first.hit_sum_sq + second.hit_sum_sq,
            survivors=tuple(x + y for x, y in zip(first.survivors, second.survivors)),
        )

    def with_tail_slope(self, **kwargs) -> "SimSummary":
        try:
            slope = tail_slope(self, **kwargs)
        except InsufficientDataError:
            slope = None
        return SimSummary(**{**self.__dict__, "tail_slope": slope})

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "b": cfg.cfg.b,
            "w": cfg.cfg.w,
            "schedule": schedule_to_dict(cfg.schedule),
            "cap": cfg.cap,
            "master_seed": cfg.master_seed,
            "start": self.start,
            "replications": self.replications,
            "hits": self.hits,
            "censored": self.censored,
            "hit_sum": self.hit_sum,
            "hit_sum_sq": self.hit_sum_sq,
            "uncensored_mean": _finite_or_none(self.uncensored_mean),
            "uncensored_m2": _finite_or_none(self.uncensored_m2),
            "mean_se": self.mean_se,
            "mean_finite_by_theory": self.mean_finite,
            "variance_finite_by_theory": self.variance_finite,
            "empirical_survival": [
                {"n": n, "survivors": c, "value": c / self.replications}
                for n, c in zip(self.grid, self.survivors)
            ],
            "tail_slope": self.tail_slope,
        }


def _finite_or_none(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def _block_summary(config: SimConfig, thr: np.ndarray, start: int, count: int) -> SimSummary:
    keys = _kernels.stream_keys(np.uint64(config.master_seed), start, count)
    times = np.empty(count, dtype=np.int64)
    _kernels.waiting_times(keys, thr, times)
    hit_times = times[times != _kernels.CENSORED]
    if config.cap < 11_000_000:  # count * cap^2 fits in int64
        hit_sum_sq = int(np.sum(hit_times * hit_times))
    else:
        hit_sum_sq = sum(int(t) ** 2 for t in hit_times)
    # censored replications survive every grid point (cap >= max grid)
    survivors = tuple(int(np.count_nonzero((times > n) | (times < 0))) for n in config.survival_grid)
    return SimSummary(
        config=config,
        start=start,
        replications=count,
        hits=int(hit_times.size),
        censored=count - int(hit_times.size),
        hit_sum=int(np.sum(hit_times)),
        hit_sum_sq=hit_sum_sq,
        survivors=survivors,
    )


def _blocks(start: int, stop: int) -> list[tuple[int, int]]:
    return [(lo, min(BLOCK, stop - lo)) for lo in range(start, stop, BLOCK)]


def run(
    config: SimConfig,
    threads: Optional[int] = None,
    start: int = 0,
    stop: Optional[int] = None,
) -> SimSummary:
    """Simulate replications ``start .. stop-1`` (default: all of them).

    Blocks of replications run on a thread pool; the summary is identical for
    any ``threads`` value because each replication owns its stream and the
    merged statistics are exact integers.
    """
    stop = config.replications if stop is None else stop
    if not 0 <= start < stop <= config.replications:
        raise ValueError("need 0 <= start < stop <= replications")
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise ValueError("threads must be >= 1")
    thr = thresholds(config.cfg, config.schedule, config.cap)
    blocks = _blocks(start, stop)
    if threads == 1 or len(blocks) == 1:
        parts = [_block_summary(config, thr, lo, n) for lo, n in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda blk: _block_summary(config, thr, *blk), blocks))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total.with_tail_slope()


def tail_slope(summary: SimSummary, min_count: int = 100, n_min: int = 1) -> float:
    """Least-squares slope of log empirical survival against log n.

    Uses grid points n >= n_min with at least ``min_count`` surviving
    replications; at least three are required.
    """
    pts = [
        (n, c)
        for n, c in zip(summary.grid, summary.survivors)
        if n >= n_min and c >= min_count
    ]
    if len(pts) < 3:
        raise InsufficientDataError(
            f"tail slope needs 3 grid points with >= {min_count} survivors, found {len(pts)}"
        )
    x = np.log([n for n, _ in pts])
    y = np.log([c / summary.replications for _, c in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def outcomes(config: SimConfig, indices: Iterable[int]) -> list[Outcome]:
    """Per-replication outcomes via the pure-Python path (slow; for inspection)."""
    return [
        simulate_one(config.cfg, config.schedule, config.cap, RandomStream(config.master_seed, i))
        for i in indices
    ]
