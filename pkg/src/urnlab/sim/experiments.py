"""Two derived experiments: the second black ball, and the Beta limit of X_n."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import stats

from ..exact import UrnConfig, survival
from . import _kernels
from .engine import BLOCK, default_threads

__all__ = [
    "BetaLimitCheck",
    "DeltaBin",
    "SecondBlackSummary",
    "beta_limit_check",
    "black_fraction_samples",
    "exact_median_interval",
    "second_black_experiment",
]


def _map_blocks(fn, reps: int, threads: Optional[int]):
    blocks = [(lo, min(BLOCK, reps - lo)) for lo in range(0, reps, BLOCK)]
    threads = default_threads() if threads is None else threads
    if threads == 1 or len(blocks) == 1:
        return [fn(*blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda blk: fn(*blk), blocks))


def exact_median_interval(cfg: UrnConfig) -> tuple[int, int]:
    """Set of medians [lo, hi] of T under the unit rule.

    lo is the smallest m with P(T <= m) >= 1/2.  If that probability is
    exactly 1/2 every point up to the next support value is also a median.
    """
    m = 1
    while survival(cfg, m) > Fraction(1, 2):
        m += 1
    return (m, m + 1) if survival(cfg, m) == Fraction(1, 2) else (m, m)


@dataclass(frozen=True)
class DeltaBin:
    """Extra waiting time for the second black ball, given the first came at draw w."""

    w: int
    samples: int
    censored: int
    mean: float
    exact_mean: int
    median: float
    exact_median: tuple[int, int]
    survival: tuple[tuple[int, float, float], ...]  # (n, empirical, exact)

    @property
    def median_matches(self) -> bool:
        lo, hi = self.exact_median
        return lo <= self.median <= hi

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "samples": self.samples,
            "censored": self.censored,
            "mean": self.mean,
            "exact_mean": self.exact_mean,
            "median": self.median,
            "exact_median": list(self.exact_median),
            "median_matches": self.median_matches,
            "survival": [{"n": n, "empirical": e, "exact": x} for n, e, x in self.survival],
        }


@dataclass(frozen=True)
class SecondBlackSummary:
    replications: int
    cap: int
    master_seed: int
    first_censored: int
    delta_censored: int
    overall_delta_mean: float
    bins: tuple[DeltaBin, ...]

    # E[T2 - T1] = E[T1 + 1] is infinite, so the pooled sample mean never settles
    overall_mean_divergent: bool = True

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "cap": self.cap,
            "master_seed": self.master_seed,
            "first_stage_censored": self.first_censored,
            "delta_censored": self.delta_censored,
            "overall_delta_mean": self.overall_delta_mean,
            "overall_delta_mean_status": "divergent (infinite expectation)",
            "bins": [b.to_dict() for b in self.bins],
        }


def second_black_experiment(
    reps: int,
    cap: int,
    master_seed: int,
    max_bin: int = 5,
    survival_grid: tuple[int, ...] = (1, 2, 5, 10, 20),
    threads: Optional[int] = None,
) -> SecondBlackSummary:
    """Start at b = w = 1, wait for the first black draw T1 and then for the second.

    Replications whose first stage is censored at ``cap`` are excluded and
    counted.  Censored second stages count as exceeding ``cap``.
    """
    if reps < 1 or cap < 1:
        raise ValueError("reps and cap must be positive")
    seed = np.uint64(master_seed)

    def block(lo: int, count: int):
        keys = _kernels.stream_keys(seed, lo, count)
        first = np.empty(count, dtype=np.int64)
        delta = np.empty(count, dtype=np.int64)
        _kernels.second_black(keys, cap, first, delta)
        return first, delta

    parts = _map_blocks(block, reps, threads)
    first = np.concatenate([p[0] for p in parts])
    delta = np.concatenate([p[1] for p in parts])

    ok = first != _kernels.CENSORED
    d_ok = delta[ok]
    d_hit = d_ok[d_ok != _kernels.CENSORED]
    overall = float(np.mean(d_hit)) if d_hit.size else math.nan

    bins = []
    for w in range(1, max_bin + 1):
        d = delta[first == w]
        hit = d[d != _kernels.CENSORED]
        as_times = np.where(d == _kernels.CENSORED, cap + 1, d)
        cfg = UrnConfig(2, w)
        surv = tuple(
            (n, float(np.count_nonzero(as_times > n)) / d.size if d.size else math.nan,
             float(survival(cfg, n)))
            for n in survival_grid
        )
        bins.append(
            DeltaBin(
                w=w,
                samples=int(d.size),
                censored=int(d.size - hit.size),
                mean=float(np.mean(hit)) if hit.size else math.nan,
                exact_mean=w + 1,
                median=float(np.median(as_times)) if d.size else math.nan,
                exact_median=exact_median_interval(cfg),
                survival=surv,
            )
        )
    return SecondBlackSummary(
        replications=reps,
        cap=cap,
        master_seed=int(master_seed),
        first_censored=int(np.count_nonzero(~ok)),
        delta_censored=int(np.count_nonzero(d_ok == _kernels.CENSORED)),
        overall_delta_mean=overall,
        bins=tuple(bins),
    )


# ---------------------------------------------------------------------------
# Beta limit of the black fraction


def black_fraction_samples(
    cfg: UrnConfig, n_draws: int, reps: int, master_seed: int, threads: Optional[int] = None
) -> np.ndarray:
    """X_n = (b + B_n)/(b + w + n) for ``reps`` independent classical urns."""
    seed = np.uint64(master_seed)

    def block(lo: int, count: int):
        keys = _kernels.stream_keys(seed, lo, count)
        out = np.empty(count, dtype=np.float64)
        _kernels.black_fractions(keys, float(cfg.b), float(cfg.w), n_draws, out)
        return out

    return np.concatenate(_map_blocks(block, reps, threads))


@dataclass(frozen=True)
class BetaLimitCheck:
    statistic: float
    critical: float
    pvalue: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical


def beta_limit_check(
    cfg: UrnConfig,
    n_draws: int = 10_000,
    reps: int = 10_000,
    master_seed: int = 0,
    level: float = 1e-3,
) -> BetaLimitCheck:
    """Kolmogorov-Smirnov distance of simulated X_n to the Beta(b, w) law."""
    x = black_fraction_samples(cfg, n_draws, reps, master_seed)
    res = stats.kstest(x, stats.beta(cfg.b, cfg.w).cdf)
    critical = float(stats.kstwo.ppf(1 - level, reps))
    return BetaLimitCheck(float(res.statistic), critical, float(res.pvalue))

