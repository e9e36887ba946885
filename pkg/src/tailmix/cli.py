"""Command-line entry point: estimate, spectest, simulate, dist."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import skew_normal as sn
from .data import Partition, TuningConstants, ingest_csv
from .errors import DegenerateError, PartitionError, TailmixError
from .mixture import component_estimate, default_partition, lambda_all
from .monte_carlo import DesignSpec, run_study
from .spec_test import make_weight, run_spec_tests

EXIT_USAGE = 2
EXIT_DEGENERATE = 3
FULL_STUDY_SIZES = (1000, 10000)
FULL_STUDY_REPS = 10000


# ------------------------------------------------------------- serialization

def to_jsonable(obj):
    """Plain-Python copy of ``obj`` with NaN mapped to null and sets sorted."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else v
    return obj


def dumps(obj) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _human(out):
    """Stream for human-readable summaries: stdout unless it carries the report."""
    return sys.stderr if out is None else sys.stdout


def _sibling(out, suffix: str):
    if out is None:
        return None
    p = Path(out)
    return p.with_name(p.stem + suffix + p.suffix)


# ------------------------------------------------------------- subcommands

def _tuning(args) -> TuningConstants:
    return TuningConstants(C=args.c)


def _two_sets(sample, text):
    if text is None:
        return default_partition(sample)
    part = Partition.parse(text)
    if part.C is not None:
        raise PartitionError("estimate takes two sets 'A|B'")
    return part.A, part.B


def cmd_estimate(args) -> int:
    sample = ingest_csv(args.input, args.y_col, args.x_col)
    tuning = _tuning(args)
    if len(sample.label_counts) < 2:
        raise PartitionError("need at least two labels: lambda must vary across X")
    A, B = _two_sets(sample, args.partitions)
    sides = (args.one_sided,) if args.one_sided else ("left", "right")
    lams = {} if args.one_sided else lambda_all(sample, tuning)
    comp = component_estimate(sample, A, B, tuning, sides=sides)

    for lab, est in lams.items():
        print(f"lambda({lab}) = {est.lambda_hat:.4f}  se {est.se:.4f}  "
              f"95% [{est.ci_low:.4f}, {est.ci_high:.4f}]", file=_human(args.out))

    if args.format == "json":
        payload = {"n": sample.n, "labels": list(sample.label_counts), "C": tuning.C}
        if lams:
            payload["lambda"] = {k: v.to_dict() for k, v in lams.items()}
        payload["components"] = comp.to_dict()
        _emit(dumps(payload), args.out)
        return 0
    header, cols = ["y"], [comp.grid]
    for name, vals, se, band in (("G", comp.g_values, comp.g_se, comp.g_band),
                                 ("H", comp.h_values, comp.h_se, comp.h_band)):
        if vals is not None:
            header += [name, f"{name}_se", f"{name}_low", f"{name}_high"]
            cols += [vals, se, band[0], band[1]]
    _emit(csv_text(header, zip(*cols)), args.out)
    if lams:
        rows = [(k, v.lambda_hat, v.se, v.ci_low, v.ci_high, v.iota, v.kappa)
                for k, v in lams.items()]
        text = csv_text(["x", "lambda_hat", "se", "ci_low", "ci_high", "iota", "kappa"], rows)
        _emit(text, _sibling(args.out, "_lambda"))
    return 0


def cmd_spectest(args) -> int:
    if args.partitions is None:
        raise PartitionError("spectest needs --partitions 'A|B|C'")
    part = Partition.parse(args.partitions)
    if part.C is None:
        raise PartitionError("spectest needs three sets 'A|B|C'")
    sample = ingest_csv(args.input, args.y_col, args.x_col)
    W = make_weight(args.weight, sample)
    comps = ("G",) if args.one_sided == "left" else ("H",) if args.one_sided == "right" \
        else ("G", "H")
    res = run_spec_tests(sample, part.A, part.B, part.C, _tuning(args), W, comps)
    for c, r in res.items():
        print(f"{c}: statistic {r.statistic:.4f}  p-value {r.p_value:.4f}",
              file=_human(args.out))
    if args.format == "json":
        _emit(dumps({"weight": args.weight, "C": args.c,
                     "results": {c: r.to_dict() for c, r in res.items()}}), args.out)
    else:
        rows = [(c, r.statistic, r.p_value, r.weighted_diff, r.variance_hat, r.scale_count)
                for c, r in res.items()]
        _emit(csv_text(["component", "statistic", "p_value", "weighted_diff",
                        "variance_hat", "scale_count"], rows), args.out)
    return 0


SIM_COLUMNS = ["mu", "beta", "sigma", "sigma_h", "p_x1", "lambdas", "reps", "seed",
               "n", "C", "q_ell", "q_r", "target", "bias", "sd", "se_over_sd", "ci95",
               "excluded_reps"]


def _design(args, n=None, reps=None) -> DesignSpec:
    return DesignSpec(mu=args.mu, beta=args.beta, sigma=args.sigma,
                      n=args.n if n is None else n, reps=args.reps if reps is None else reps,
                      tuning=_tuning(args), master_seed=args.seed)


def _report_rows(report):
    d = report.design
    base = d.columns()
    for r in report.rows:
        yield [base[k] for k in SIM_COLUMNS[:8]] + [
            d.n, d.tuning.C, r.q_ell, r.q_r, r.target, r.bias, r.sd, r.se_over_sd, r.ci95,
            r.excluded_reps]


def _report_json(report) -> dict:
    d = report.design
    out = {"design": d.columns() | {"n": d.n, "C": d.tuning.C},
           "rows": [vars(r) for r in report.rows]}
    f = report.figure
    if f is not None:
        out["figure"] = {"grid": f.grid, "partition": {"A": f.partition[0], "B": f.partition[1]},
                         "reps_used": f.reps_used, "excluded_reps": f.excluded_reps,
                         "G": vars(f.G), "H": vars(f.H)}
    return out


def _print_table(reports, stream):
    print(f"{'n':>7} {'q_ell':>6} {'q_r':>6} {'target':>6} {'bias':>8} {'sd':>7} "
          f"{'se/sd':>7} {'ci95':>6}", file=stream)
    def f(v, w, p):
        return f"{'-':>{w}}" if v is None else f"{v:>{w}.{p}f}"

    for rep in reports:
        for r in rep.rows:
            print(f"{rep.design.n:>7} {r.q_ell:>6.3f} {r.q_r:>6.3f} {r.target:>6} "
                  f"{f(r.bias, 8, 4)} {f(r.sd, 7, 4)} {f(r.se_over_sd, 7, 4)} "
                  f"{f(r.ci95, 6, 4)}", file=stream)


def cmd_simulate(args) -> int:
    if args.full_study:
        designs = [_design(args, n=n, reps=FULL_STUDY_REPS) for n in FULL_STUDY_SIZES]
    else:
        designs = [_design(args)]
    figures = args.format == "json" or args.figures is not None
    reports = [run_study(d, workers=args.workers, figures=figures) for d in designs]
    _print_table(reports, _human(args.out))
    if args.format == "json":
        payload = [_report_json(r) for r in reports]
        _emit(dumps(payload if args.full_study else payload[0]), args.out)
    else:
        _emit(csv_text(SIM_COLUMNS, [row for r in reports for row in _report_rows(r)]),
              args.out)
    if args.figures is not None:
        from .plotting import render_figure

        for r in reports:
            if r.figure is not None:
                render_figure(r.figure, args.figures, stem=f"components_n{r.design.n}")
    return 0


def cmd_dist(args) -> int:
    params = sn.SkewNormalParams(args.mu, args.sigma, args.beta)
    ys = np.array([float(t) for t in args.y.split(",")]) if args.y else np.array([])
    mean, var = sn.moments(params)
    payload = {"mu": params.mu, "sigma": params.sigma, "beta": params.beta,
               "mean": mean, "variance": var, "y": ys,
               "pdf": sn.pdf(params, ys), "cdf": sn.cdf(params, ys)}
    if args.format == "json":
        _emit(dumps(payload), args.out)
    else:
        _emit(csv_text(["y", "pdf", "cdf"], zip(ys, payload["pdf"], payload["cdf"])), args.out)
    return 0


# ------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tailmix", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=True):
        if data:
            sp.add_argument("--input", required=True, help="CSV file with outcome and label")
            sp.add_argument("--y-col", default="y")
            sp.add_argument("--x-col", default="x")
        sp.add_argument("--c", type=float, default=0.5, help="tuning constant C")
        sp.add_argument("--out", help="output file (default: standard output)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("estimate", help="mixing proportions and component CDFs")
    common(e)
    e.add_argument("--partitions", help="'A|B' label sets, e.g. 'a,b|c'")
    e.add_argument("--one-sided", choices=("left", "right"))
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("spectest", help="over-identification test")
    common(s)
    s.add_argument("--partitions", help="'A|B|C' label sets")
    s.add_argument("--weight", choices=("uniform", "central", "gauss"), default="uniform")
    s.add_argument("--one-sided", choices=("left", "right"))
    s.set_defaults(func=cmd_spectest)

    m = sub.add_parser("simulate", help="skew-normal Monte Carlo study")
    common(m, data=False)
    m.add_argument("--mu", type=float, default=0.0)
    m.add_argument("--beta", type=float, default=5.0)
    m.add_argument("--sigma", type=float, default=1.0)
    m.add_argument("--n", type=int, default=1000)
    m.add_argument("--reps", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--workers", type=int, help="process count (capped by TAILMIX_THREADS)")
    m.add_argument("--figures", metavar="DIR", help="also render G/H figures into DIR")
    m.add_argument("--full-study", action="store_true",
                   help=f"{FULL_STUDY_REPS} reps at n in {FULL_STUDY_SIZES}")
    m.set_defaults(func=cmd_simulate)

    d = sub.add_parser("dist", help="skew-normal pdf, cdf and moments")
    d.add_argument("--mu", type=float, default=0.0)
    d.add_argument("--sigma", type=float, default=1.0)
    d.add_argument("--beta", type=float, default=0.0)
    d.add_argument("--y", help="comma-separated evaluation points")
    d.add_argument("--out")
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.set_defaults(func=cmd_dist)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateError as exc:
        print(f"tailmix: degenerate estimate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (TailmixError, ValueError, OSError) as exc:
        print(f"tailmix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
