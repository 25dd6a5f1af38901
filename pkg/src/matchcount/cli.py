"""Command-line interface: ``matchcount {exact,estimate,closed-form,experiment,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 capability limit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import closed_forms as cf
from . import ensembles, estimator, exact
from .exact import CapabilityError
from .matrix import MatrixError, read_matrix
from .reports import ExperimentReport, rational_str
from .rng import CounterStream
from .verify import run_checks

EXIT_OK, EXIT_VERIFY, EXIT_INVALID, EXIT_CAPABILITY = 0, 1, 2, 3

# Largest sizes for which `estimate` also prints the exact values.
EXACT_MEAN_MAX_COLS = 20
EXACT_MOMENT_MAX_COLS = 14
EXACT_PERMANENT_MAX_N = 16


class UsageError(ValueError):
    pass


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed {text} is not an unsigned 64-bit integer")
    return v


def _int_range(text: str) -> list[int]:
    """``"5"`` or inclusive ``"1:40"``."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N or LO:HI") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from None


def _add_globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=["text", "json", "csv"], default=d(None),
                   help="output format (default: text, csv for experiment)")
    p.add_argument("--seed", type=_u64, default=d(0), help="unsigned 64-bit seed (default 0)")
    p.add_argument("--workers", type=int, default=d(1), help="parallel worker processes")
    p.add_argument("--deterministic", action="store_true", default=d(False),
                   help="omit run times so reruns are byte-identical")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchcount", description=__doc__.splitlines()[0])
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_globals(p, suppress=True)
        return p

    p = add("exact", help="exact AM, permanent, k-matching vector or the extended-matrix identity")
    p.add_argument("matrix_file")
    p.add_argument("--what", choices=["am", "per", "vector", "corollary3"], default="am")
    p.add_argument("--method", choices=["dp", "recursive"], default="dp", help="AM algorithm")

    p = add("estimate", help="Monte Carlo estimate with RM or AMM")
    p.add_argument("matrix_file")
    p.add_argument("--alg", choices=["rm", "amm"], default="amm")
    p.add_argument("--samples", type=int, default=10_000)

    p = add("closed-form", help="tabulate an exact ensemble formula")
    p.add_argument("--formula", required=True,
                   choices=["t3", "t4", "t5", "t6", "lemma2", "t7", "t8", "l2ratio"])
    p.add_argument("--n", dest="n_range", type=_int_range, help="N or LO:HI (inclusive)")
    p.add_argument("--n-range", dest="n_range", type=_int_range)
    p.add_argument("--m", type=int, help="rows for t3/t4 (default m = n)")
    p.add_argument("--m-ones", type=int, help="number of ones/edges for lemma2, t8, l2ratio")
    p.add_argument("--density", type=_fraction, default=Fraction(52, 100),
                   help="ones = ceil(density * n^2) when --m-ones is absent (default 0.52)")
    p.add_argument("--eps", type=_fraction, action="append", help="t7 epsilon; repeatable")

    p = add("experiment", help="ensemble statistic versus its closed form")
    p.add_argument("--ensemble", required=True, help="ensemble JSON file or inline JSON")
    p.add_argument("--stat", choices=["am", "ratio"], default="am")
    p.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    p.add_argument("--n-range", type=_int_range, help="override rows = cols = n for each n")
    p.add_argument("--samples", type=int, default=1000, help="matrices drawn in sample mode")
    p.add_argument("--estimator", choices=["exact", "amm"], default="exact",
                   help="per-matrix AM value: exact DP or one AMM sample (sample mode, stat am)")

    p = add("verify", help="run the cross-module invariant suite")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return parser


# -- subcommands ---------------------------------------------------------------

def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1000


def cmd_exact(args, report: ExperimentReport) -> tuple[str, int]:
    a = read_matrix(args.matrix_file)
    report.config.update(what=args.what, method=args.method, rows=a.rows, cols=a.cols)
    if args.what == "am":
        fn = exact.am_recursive if args.method == "recursive" else exact.am_dp
        value, ms = _timed(lambda: fn(a))
        report.add_row({"what": "am", "value": value}, ms)
        return str(value), EXIT_OK
    if args.what == "per":
        value, ms = _timed(lambda: exact.permanent(a))
        report.add_row({"what": "per", "value": value}, ms)
        return str(value), EXIT_OK
    if args.what == "vector":
        vec, ms = _timed(lambda: exact.matching_vector(a))
        for k, c in enumerate(vec):
            report.add_row({"k": k, "count": c}, ms if k == 0 else 0.0)
        return " ".join(str(c) for c in vec), EXIT_OK
    chk, ms = _timed(lambda: exact.verify_corollary3(a))
    report.add_row({"n": a.rows, "am": chk.am, "n_factorial": chk.n_factorial,
                    "lhs": chk.lhs, "per": chk.per, "holds": chk.holds}, ms)
    text = f"{chk.lhs} = {chk.per} OK" if chk.holds else f"{chk.lhs} != {chk.per} FAIL"
    return text, EXIT_OK if chk.holds else EXIT_VERIFY


def cmd_estimate(args, report: ExperimentReport) -> tuple[str, int]:
    a = read_matrix(args.matrix_file)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    report.config.update(alg=args.alg, samples=args.samples, rows=a.rows, cols=a.cols)
    stats, ms = _timed(lambda: estimator.run_batch(a, args.alg, args.samples, args.seed, args.workers))
    row = {"alg": args.alg, "samples": stats.n_samples, "sum": stats.sum, "sum_sq": stats.sum_sq,
           "mean": stats.mean, "stderr": stats.stderr,
           "empirical_ratio": stats.critical_ratio if stats.sum else None,
           "exact": None, "exact_ratio": None, "z": None}
    mean_ok = (a.cols <= EXACT_MEAN_MAX_COLS if args.alg == "amm" else a.rows <= EXACT_PERMANENT_MAX_N)
    if mean_ok:
        ex = estimator.exact_mean(a, args.alg)
        row["exact"] = ex
        if stats.stderr > 0:
            row["z"] = float((stats.mean - ex) / Fraction(stats.stderr))
        if ex and a.cols <= EXACT_MOMENT_MAX_COLS:
            row["exact_ratio"] = estimator.critical_ratio_exact(a, args.alg)
    report.add_row(row, ms)
    if args.alg == "rm" and stats.sum == 0:
        if row["exact"] == 0:
            print("warning: permanent is 0", file=sys.stderr)
        else:
            print("warning: all samples are 0 (permanent may be 0)", file=sys.stderr)
    lines = [f"mean {rational_str(stats.mean)} ({float(stats.mean):.6g})",
             f"stderr {stats.stderr:.6g}",
             "empirical critical ratio " + (f"{float(row['empirical_ratio']):.6g}" if stats.sum else "undefined")]
    if row["exact"] is not None:
        lines.append(f"exact {row['exact']}")
    if row["exact_ratio"] is not None:
        lines.append(f"exact critical ratio {rational_str(row['exact_ratio'])} ({float(row['exact_ratio']):.6g})")
    return "\n".join(lines), EXIT_OK


def _closed_form_rows(args) -> list[dict]:
    f, ns = args.formula, args.n_range
    if not ns:
        raise UsageError("--n or --n-range is required")
    rows = []

    def ones_for(n):
        return args.m_ones if args.m_ones is not None else math.ceil(args.density * n * n)

    prev = None
    for n in ns:
        if f in ("t3", "t4"):
            m = n if args.m is None else args.m
            fn = cf.t3_mean if f == "t3" else cf.t4_second_moment
            rows.append({"m": m, "n": n, "value": fn(m, n)})
        elif f == "t5":
            b = cf.t5_bounds(n)
            rows.append({"n": n, "k_star": b.k_star, "h": b.h, "mean": b.mean,
                         "upper_paper": b.upper_paper, "upper_rigorous": b.upper_rigorous,
                         "lower_holds": b.lower_holds, "upper_rigorous_holds": b.upper_rigorous_holds,
                         "upper_paper_holds": b.upper_paper_holds})
        elif f == "t6":
            r = cf.t6_ratio(n)
            rows.append({"n": n, "numerator": r.numerator, "denominator": r.denominator,
                         "ratio": r.ratio, "threshold": r.threshold, "threshold_lo": r.threshold_lo,
                         "threshold_hi": r.threshold_hi, "holds": r.holds})
        elif f == "lemma2":
            rows.append({"n": n, "m_ones": ones_for(n), "value": cf.lemma2_mean(ones_for(n), n)})
        elif f == "t7":
            for eps in args.eps or [Fraction(0)]:
                rows.append({"n": n, "eps": eps, "value": cf.t7_tail(n, eps)})
        elif f == "t8":
            mean, second = cf.t8_moments(ones_for(n), n)
            rows.append({"n": n, "m_edges": ones_for(n), "mean": mean, "second": second})
        else:
            r = cf.lemma2_ratio(ones_for(n), n)
            rows.append({"n": n, "m_edges": ones_for(n), "ratio": r,
                         "below_previous": None if prev is None else r < prev})
            prev = r
    return rows


def cmd_closed_form(args, report: ExperimentReport) -> tuple[str, int]:
    report.config.update(formula=args.formula, n=args.n_range, m=args.m, m_ones=args.m_ones,
                         density=rational_str(args.density),
                         eps=[rational_str(e) for e in args.eps] if args.eps else None)
    t0 = time.perf_counter()
    rows = _closed_form_rows(args)
    ms = (time.perf_counter() - t0) * 1000 / max(len(rows), 1)
    for r in rows:
        report.add_row(r, ms)
    return _text_table(report), EXIT_OK


def _load_ensemble(text: str) -> ensembles.EnsembleSpec:
    src = text if text.lstrip().startswith("{") else open(text).read()
    try:
        obj = json.loads(src)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid ensemble JSON: {exc}") from None
    return ensembles.EnsembleSpec.from_json_obj(obj)


def _closed_form_for(spec: ensembles.EnsembleSpec, stat: str) -> Fraction | None:
    m, n = spec.rows, spec.cols
    uniform = spec.kind == "exhaustive" or (spec.kind == "bernoulli" and spec.p == Fraction(1, 2))
    if stat == "am":
        if uniform and m <= n:
            return cf.t3_mean(m, n)
        if spec.kind == "fixed_ones" and m == n:
            return cf.lemma2_mean(spec.m_ones, n)
        return None
    if uniform and m <= n:
        return cf.t4_second_moment(m, n) / cf.t3_mean(m, n) ** 2
    return None


def _experiment_point(spec, args) -> dict:
    row = {"rows": spec.rows, "cols": spec.cols, "kind": spec.kind, "stat": args.stat, "mode": args.mode}
    closed = _closed_form_for(spec, args.stat)
    if args.mode == "exhaustive":
        mats = list(ensembles.enumerate_matrices(spec))
        weights = [ensembles.matrix_probability(spec, a) for a in mats]
        mean = sum((w * estimator.exact_mean(a, "amm") for w, a in zip(weights, mats)), Fraction(0))
        if args.stat == "am":
            value = mean
        else:
            second = sum((w * estimator.exact_second_moment(a, "amm") for w, a in zip(weights, mats)),
                         Fraction(0))
            value = second / mean**2
        row.update(n_matrices=len(mats), empirical=value, stderr=None)
    else:
        rng = np.random.default_rng(args.seed)
        mats = [ensembles.sample(spec, rng) for _ in range(args.samples)]
        exact_vals = [estimator.exact_mean(a, "amm") for a in mats]
        if args.stat == "am" and args.estimator == "amm":
            vals = [estimator.amm_sample(a, CounterStream(args.seed, i)) for i, a in enumerate(mats)]
            row["exact_aggregate"] = Fraction(sum(exact_vals), len(mats))
        elif args.stat == "am":
            vals = exact_vals
        else:
            vals = None
        if vals is not None:
            mean = Fraction(sum(vals), len(vals))
            var = Fraction(len(vals) * sum(v * v for v in vals) - sum(vals) ** 2,
                           len(vals) * (len(vals) - 1)) if len(vals) > 1 else Fraction(0)
            se = math.sqrt(var / len(vals))
            row.update(n_matrices=len(mats), empirical=mean, stderr=se)
            if "exact_aggregate" in row and se > 0:
                row["z"] = float((mean - row["exact_aggregate"]) / Fraction(se))
        else:
            second = Fraction(sum(estimator.exact_second_moment(a, "amm") for a in mats), len(mats))
            first = Fraction(sum(exact_vals), len(mats))
            row.update(n_matrices=len(mats), empirical=second / first**2, stderr=None)
    row["closed_form"] = closed
    if closed is not None:
        dev = row["empirical"] - closed
        row["abs_dev"] = abs(dev)
        row["rel_dev"] = abs(dev) / closed
        row["exact_match"] = dev == 0 if args.mode == "exhaustive" else None
    return row


def cmd_experiment(args, report: ExperimentReport) -> tuple[str, int]:
    base = _load_ensemble(args.ensemble)
    report.config.update(ensemble=base.to_json_obj(), stat=args.stat, mode=args.mode,
                         samples=args.samples if args.mode == "sample" else None,
                         estimator=args.estimator)
    specs = [base]
    if args.n_range:
        specs = [ensembles.EnsembleSpec(base.kind, n, n, base.p, base.m_ones) for n in args.n_range]
    for spec in specs:
        row, ms = _timed(lambda: _experiment_point(spec, args))
        report.add_row(row, ms)
    return _text_table(report), EXIT_OK


def cmd_verify(args, report: ExperimentReport) -> tuple[str, int]:
    report.config.update(level=args.level)
    results = run_checks(args.level)
    lines = []
    for r in results:
        report.add_row({"check": r.name, "passed": r.passed, "detail": r.detail, "witness": r.witness},
                       r.seconds * 1000)
        if r.passed:
            lines.append(f"PASS  {r.name}  ({r.detail})")
        else:
            lines.append(f"FAIL  {r.name}: {r.detail}")
            if r.witness is not None:
                body = r.witness.splitlines() or ["(0x0 matrix)"]
                lines.append("      witness:\n" + "\n".join("      " + w for w in body))
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines), EXIT_VERIFY if failed else EXIT_OK


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return rational_str(v)
    if v is None:
        return "-"
    return str(v)


def _text_table(report: ExperimentReport) -> str:
    cols = [c for c in report.columns() if not c.endswith("_float") and c != "runtime_ms"]
    if len(report.rows) == 1 and "value" in report.rows[0]:
        return _cell(report.rows[0]["value"])
    out = ["\t".join(cols)]
    for r in report.rows:
        out.append("\t".join(_cell(r.get(c)) for c in cols))
    return "\n".join(out)


COMMANDS = {
    "exact": cmd_exact,
    "estimate": cmd_estimate,
    "closed-form": cmd_closed_form,
    "experiment": cmd_experiment,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    fmt = args.format or ("csv" if args.command == "experiment" else "text")
    report = ExperimentReport(args.command, {}, args.seed)
    try:
        text, code = COMMANDS[args.command](args, report)
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (MatrixError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.deterministic:
        for r in report.rows:
            r["runtime_ms"] = None
    if fmt == "json":
        sys.stdout.write(report.to_json() + "\n")
    elif fmt == "csv":
        sys.stdout.write(report.to_csv())
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
