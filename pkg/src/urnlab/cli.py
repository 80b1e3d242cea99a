"""Command-line front end.

    urnlab table --b 1 --w 1 --n-max 10
    urnlab moments --b 3 --w 2 --r-max 2
    urnlab classify --b 1 --w 1 --schedule '{"type":"poly","alpha":"1","p":1}'
    urnlab simulate --b 3 --w 2 --reps 1000000 --cap 1000000 --seed 42
    urnlab second-black --reps 400000 --cap 100000 --seed 9
    urnlab check

Every command prints a JSON envelope (or CSV with ``--format csv``).
Exit status: 0 success, 2 usage or parse error, 3 failed acceptance check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from ._arith import format_rational
from .exact import INF, UrnConfig, expectation, pmf, raw_moment, survival, variance
from .schedule import (
    AlmostSurelyFinite,
    Constant,
    classify,
    schedule_from_dict,
    schedule_to_dict,
    survival_general,
    survival_general_float,
)

EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3


def exact_value(x) -> dict:
    """``{"value": "p/q", "float": f}``; infinite values render as "inf"."""
    if x is INF:
        return {"value": "inf", "float": "inf"}
    return {"value": format_rational(x), "float": float(x)}


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def envelope(command: str, config: dict, results, seed: Optional[int] = None) -> dict:
    out = {"command": command, "config": config, "version": __version__}
    if seed is not None:
        out["seed"] = seed
    out["results"] = results
    return _clean(out)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _urn(args: argparse.Namespace, parser: argparse.ArgumentParser) -> UrnConfig:
    try:
        return UrnConfig(args.b, args.w)
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))


def _schedule(text: str, parser: argparse.ArgumentParser):
    try:
        return schedule_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        parser.error(f"--schedule is not valid JSON: {exc}")
    except ValueError as exc:
        parser.error(f"invalid --schedule: {exc}")


# ---------------------------------------------------------------------------
# commands


def cmd_table(args, parser) -> tuple[str, int]:
    cfg = _urn(args, parser)
    if args.n_max < 0:
        parser.error("--n-max must be nonnegative")
    rows = []
    for n in range(args.n_max + 1):
        s = survival(cfg, n)
        p: Optional[Fraction] = pmf(cfg, n) if n >= 1 else None
        rows.append((n, s, p))
    if args.format == "csv":
        text = _csv(
            ["n", "survival_num", "survival_den", "survival_float", "pmf_num", "pmf_den", "pmf_float"],
            [
                (n, s.numerator, s.denominator, float(s))
                + ((p.numerator, p.denominator, float(p)) if p is not None else (None, None, None))
                for n, s, p in rows
            ],
        )
        return text, 0
    results = [
        {"n": n, "survival": exact_value(s), "pmf": exact_value(p) if p is not None else None}
        for n, s, p in rows
    ]
    return _json(envelope("table", {"b": cfg.b, "w": cfg.w, "n_max": args.n_max}, results)), 0


def cmd_moments(args, parser) -> tuple[str, int]:
    cfg = _urn(args, parser)
    if args.r_max < 1:
        parser.error("--r-max must be >= 1")
    reports = [raw_moment(cfg, r) for r in range(1, args.r_max + 1)]
    e, v = expectation(cfg), variance(cfg)
    if args.format == "csv":
        rows = [
            (f"E[T^{m.order}]", m.finite, format_rational(m.value) if m.finite else "inf",
             float(m.value) if m.finite else "inf")
            for m in reports
        ]
        rows.append(("E[T]", e is not INF, exact_value(e)["value"], exact_value(e)["float"]))
        rows.append(("V[T]", v is not INF, exact_value(v)["value"], exact_value(v)["float"]))
        return _csv(["quantity", "finite", "value", "float"], rows), 0
    results = {
        "raw_moments": [
            {
                "order": m.order,
                "finite": m.finite,
                **exact_value(m.value if m.finite else INF),
                "criterion": f"finite iff b > r ({cfg.b} > {m.order}: {m.finite})",
            }
            for m in reports
        ],
        "expectation": {**exact_value(e), "criterion": "finite iff b >= 2"},
        "variance": {**exact_value(v), "criterion": "finite iff b >= 3"},
    }
    config = {"b": cfg.b, "w": cfg.w, "r_max": args.r_max}
    return _json(envelope("moments", config, results)), 0


def cmd_classify(args, parser) -> tuple[str, int]:
    cfg = _urn(args, parser)
    sched = _schedule(args.schedule, parser)
    verdict = classify(cfg, sched, terms=args.terms)
    config = {"b": cfg.b, "w": cfg.w, "schedule": schedule_to_dict(sched)}
    if isinstance(verdict, AlmostSurelyFinite):
        results = {"verdict": "almost surely finite"}
    else:
        upper_n = survival_general(cfg, sched, args.n)
        results = {
            "verdict": "defective",
            "series_bracket": {"lower": verdict.lower, "upper": verdict.upper, "terms": verdict.terms},
            "defect_bracket": {
                "n": args.n,
                "lower": verdict.lower,
                "upper": math.nextafter(float(upper_n), math.inf),
                "upper_exact": format_rational(upper_n),
            },
        }
    if args.format == "csv":
        if results["verdict"] == "defective":
            br = results["defect_bracket"]
            return _csv(["verdict", "n", "lower", "upper"], [("defective", br["n"], br["lower"], br["upper"])]), 0
        return _csv(["verdict"], [(results["verdict"],)]), 0
    return _json(envelope("classify", config, results)), 0


def _grid(text: str, parser) -> tuple[int, ...]:
    try:
        grid = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        parser.error("--grid must be a comma-separated list of positive integers")
    if any(n < 1 for n in grid):
        parser.error("--grid entries must be positive")
    return grid


def cmd_simulate(args, parser) -> tuple[str, int]:
    from .sim import SimConfig, run

    cfg = _urn(args, parser)
    sched = _schedule(args.schedule, parser)
    grid = _grid(args.grid, parser) if args.grid else tuple(
        n for n in (1, 10, 100, 1000, 10_000) if n <= args.cap
    )
    try:
        config = SimConfig(cfg, sched, args.reps, args.cap, args.seed, grid)
        summary = run(config, threads=args.threads)
    except ValueError as exc:
        parser.error(str(exc))
    exact_surv = [survival_general_float(cfg, sched, n) for n in summary.grid]
    if args.format == "csv":
        rows = [
            (n, c, c / summary.replications, x)
            for n, c, x in zip(summary.grid, summary.survivors, exact_surv)
        ]
        return _csv(["n", "survivors", "empirical", "exact"], rows), 0

    results = summary.to_dict()
    for row, x in zip(results["empirical_survival"], exact_surv):
        row["exact"] = x
        row["binomial_se"] = math.sqrt(x * (1 - x) / summary.replications)
    if sched == Constant(1):
        e, v = expectation(cfg), variance(cfg)
        results["exact"] = {"expectation": exact_value(e), "variance": exact_value(v)}
        if e is not INF and v is not INF:
            tol = 4 * math.sqrt(float(v) / summary.replications)
            results["exact"]["mean_tolerance_4se"] = tol
            results["exact"]["mean_within_tolerance"] = abs(summary.uncensored_mean - float(e)) <= tol
    if not summary.mean_finite:
        results["warning"] = "mean is infinite by theory; the sample mean does not converge"
    elif not summary.variance_finite:
        results["warning"] = "variance is infinite by theory; no CLT standard error is reported"
    cfg_echo = {
        "b": cfg.b, "w": cfg.w, "schedule": schedule_to_dict(sched), "reps": args.reps,
        "cap": args.cap, "grid": list(grid),
    }
    return _json(envelope("simulate", cfg_echo, results, seed=args.seed)), 0


def cmd_second_black(args, parser) -> tuple[str, int]:
    from .sim import second_black_experiment

    if args.reps < 1 or args.cap < 1:
        parser.error("--reps and --cap must be positive")
    res = second_black_experiment(args.reps, args.cap, args.seed, max_bin=args.max_bin, threads=args.threads)
    if args.format == "csv":
        rows = [
            (b.w, b.samples, b.censored, b.mean, b.exact_mean, b.median, b.exact_median[0], b.exact_median[1])
            for b in res.bins
        ]
        header = ["w", "samples", "censored", "mean", "exact_mean", "median", "exact_median_lo", "exact_median_hi"]
        return _csv(header, rows), 0
    config = {"reps": args.reps, "cap": args.cap, "max_bin": args.max_bin}
    return _json(envelope("second-black", config, res.to_dict(), seed=args.seed)), 0


def cmd_check(args, parser) -> tuple[str, int]:
    from .acceptance import CRITERIA, run_all

    only = set(_grid(args.only, parser)) if args.only else None
    if only is not None and not only <= {c.number for c in CRITERIA}:
        parser.error(f"--only: unknown criterion numbers {sorted(only - {c.number for c in CRITERIA})}")
    results = run_all(include_slow=args.slow, only=only)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        payload = [
            {"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail, "seconds": r.seconds}
            for r in results
        ]
        text = _json(envelope("check", {"slow": args.slow}, payload))
    else:
        lines = [r.line() for r in results]
        lines.append(f"{len(results) - len(failed)}/{len(results)} criteria passed")
        text = "\n".join(lines) + "\n"
    return text, EXIT_CHECK_FAILED if failed else 0


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urnlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"urnlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def urn_args(p):
        p.add_argument("--b", type=int, required=True, help="initial black balls (>= 1)")
        p.add_argument("--w", type=int, required=True, help="initial white balls (>= 1)")

    def fmt(p, choices=("json", "csv")):
        p.add_argument("--format", choices=choices, default=choices[0])

    p = sub.add_parser("table", help="exact survival and pmf of T for n = 0..n_max")
    urn_args(p)
    p.add_argument("--n-max", type=int, required=True)
    fmt(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("moments", help="raw moments, expectation and variance of T")
    urn_args(p)
    p.add_argument("--r-max", type=int, default=2)
    fmt(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("classify", help="finiteness of T under a replacement schedule")
    urn_args(p)
    p.add_argument("--schedule", required=True, help='JSON, e.g. {"type":"constant","c":1}')
    p.add_argument("--n", type=int, default=1000, help="horizon for the exact upper defect bound")
    p.add_argument("--terms", type=int, default=100_000, help="series terms summed exactly")
    fmt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="Monte Carlo waiting times")
    urn_args(p)
    p.add_argument("--schedule", default='{"type":"constant","c":1}')
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--cap", type=int, required=True, help="censoring horizon")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", help="comma-separated n values for empirical survival")
    p.add_argument("--threads", type=int, default=None, help="default: URNLAB_THREADS or CPU count")
    fmt(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("second-black", help="waiting time for the second black ball from b = w = 1")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-bin", type=int, default=5)
    p.add_argument("--threads", type=int, default=None)
    fmt(p)
    p.set_defaults(func=cmd_second_black)

    p = sub.add_parser("check", help="run the acceptance criteria")
    p.add_argument("--slow", action="store_true", help="include slow criteria")
    p.add_argument("--only", help="comma-separated criterion numbers")
    fmt(p, choices=("text", "json"))
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    text, code = args.func(args, parser)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
