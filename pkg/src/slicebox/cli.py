"""Command-line interface: ``slicebox sample | compare | diagnose``.

Exit codes: 0 success, 1 runtime failure (sampler error, unreadable draws,
failed KS check in ``diagnose``), 2 usage error.
"""

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from . import scenarios
from .diagnostics import ReportOptions, reference_cdf, summarize
from .errors import ArgumentError, LookupFailure, ParseError, SliceboxError
from .rng import RngStream
from .samplers import DrawRecord, Method, SamplerConfig, run_chain
from .targets import BUILTINS, Support, builtin, resolve

CSV_HEADER = ("t", "x", "n_evals", "n_shrinks")
SEED_ENV = "SLICEBOX_SEED"


class UsageError(Exception):
    pass


def _bounds(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected F,F, got {text!r}") from None
    return lo, hi


def _default_seed():
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="slicebox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run one sampler and write its draws")
    p.add_argument("--target", required=True, help="builtin name or expr:TEXT")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--x0", type=float)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--a", type=float, help="sigmoid scale A (unbounded only)")
    p.add_argument("--width", type=float, help="initial width (stepout only)")
    p.add_argument("--bounds", type=_bounds, help="st,ed (bounded only)")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--out", help="draws file; standard output if omitted")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _report_flags(p)

    p = sub.add_parser("compare", help="run a named experiment scenario")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario")
    g.add_argument("--scenario-file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", help="write each sampler's draws as CSV here")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("diagnose", help="recompute a report from a draws CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--max-iter", type=int, default=1000)
    _report_flags(p)
    return parser


def _report_flags(p):
    p.add_argument("--reference", choices=sorted(BUILTINS), help="builtin CDF for KS")
    p.add_argument("--threshold", type=float, help="report occupancy of x > threshold")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--ks-thin", type=int, default=10)


def _report_options(args):
    ref = reference_cdf(builtin(args.reference)) if args.reference else None
    return ReportOptions(bins=args.bins, threshold=args.threshold, reference=ref, ks_thin=args.ks_thin)


def _config_from_args(args):
    method = Method(args.method)
    if method is Method.BOUNDED and args.bounds is None:
        raise UsageError("--method bounded requires --bounds st,ed")
    if args.bounds is not None and method is not Method.BOUNDED:
        raise UsageError("--bounds only applies to --method bounded")
    if args.a is not None and method is not Method.UNBOUNDED:
        raise UsageError("--a only applies to --method unbounded")
    if args.width is not None and method is not Method.STEPPING_OUT:
        raise UsageError("--width only applies to --method stepout")
    if args.n <= 0 or args.burn_in < 0 or args.thin < 1 or args.max_iter < 1:
        raise UsageError("--n and --thin must be positive, --burn-in non-negative")
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        return SamplerConfig(
            method=method,
            a_scale=args.a if args.a is not None else 100.0,
            width=args.width if args.width is not None else 1.0,
            bounds=args.bounds,
            max_iter=args.max_iter,
            seed=seed,
        )
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None


def _resolve_target(spec, method):
    support = Support.POSITIVE_REALS if method is Method.POSITIVE else Support.REAL_LINE
    try:
        return resolve(spec, support)
    except (LookupFailure, ParseError) as exc:
        raise UsageError(str(exc)) from None


def write_csv(fh, records, burn_in=0, thin=1):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for i, r in enumerate(records):
        w.writerow((burn_in + (i + 1) * thin, repr(r.x), r.n_evals, r.n_shrinks))


def read_csv(fh, max_iter=1000):
    """DrawRecords from a draws CSV; ArgumentError cites the bad line."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise ArgumentError(f"line 1: expected header {','.join(CSV_HEADER)}")
    records = []
    for row in reader:
        lineno = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise ArgumentError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            int(row[0])
            x = float(row[1])
            n_evals, n_shrinks = int(row[2]), int(row[3])
        except ValueError:
            raise ArgumentError(f"line {lineno}: malformed value in {row!r}") from None
        if not math.isfinite(x) or n_evals < 0 or n_shrinks < 1:
            raise ArgumentError(f"line {lineno}: out-of-range value in {row!r}")
        records.append(DrawRecord(x, n_evals, n_shrinks, max_iter_hit=n_shrinks >= max_iter))
    if not records:
        raise ArgumentError("no draws in file")
    return records


def _open_out(path):
    if path is None:
        return sys.stdout
    return open(path, "w", newline="")


def cmd_sample(args):
    cfg = _config_from_args(args)
    d = _resolve_target(args.target, cfg.method)
    x0 = args.x0
    if x0 is None:
        x0 = sum(cfg.bounds) / 2 if cfg.method is Method.BOUNDED else 1.0
    opts = _report_options(args)
    records = run_chain(d, cfg, x0, args.n, args.burn_in, args.thin, rng=RngStream(cfg.seed, 0))
    report = summarize(records, opts)
    out = _open_out(args.out)
    try:
        if args.format == "csv":
            write_csv(out, records, args.burn_in, args.thin)
        else:
            rows = [
                {"t": args.burn_in + (i + 1) * args.thin, "x": r.x,
                 "n_evals": r.n_evals, "n_shrinks": r.n_shrinks}
                for i, r in enumerate(records)
            ]
            json.dump({"draws": rows, "report": report.to_dict()}, out)
            out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(report.to_text(title=f"{cfg.method.value} on {args.target}"), file=sys.stderr)
    return 0


def run_scenario(spec, seed):
    """{method value: (records, report)} in the scenario's method order."""
    ref = reference_cdf(builtin(spec.reference)) if spec.reference else None
    opts = ReportOptions(bins=spec.bins, threshold=spec.threshold, reference=ref, ks_thin=spec.ks_thin)
    results = {}
    for chain_id, method in enumerate(spec.methods):
        cfg = SamplerConfig(
            method=method, a_scale=spec.a_scale, width=spec.width, bounds=spec.bounds,
            max_iter=spec.max_iter, seed=seed,
        )
        d = _resolve_target(spec.target, method)
        records = run_chain(
            d, cfg, spec.x0, spec.n, spec.burn_in, spec.thin, rng=RngStream(seed, chain_id)
        )
        results[method.value] = (records, summarize(records, opts))
    return results


_TABLE_COLS = ("mean", "mean_shrinks", "mean_evals", "first_evals", "mode_occupancy", "ess", "ks_pass")


def comparison_table(results):
    header = ("sampler",) + _TABLE_COLS
    rows = [header]
    for name, (_, rep) in results.items():
        cells = [name]
        for col in _TABLE_COLS:
            v = getattr(rep, col)
            if v is None:
                cells.append("-")
            elif isinstance(v, bool):
                cells.append(str(v).lower())
            elif isinstance(v, int):
                cells.append(str(v))
            else:
                cells.append(f"{v:.4g}")
        rows.append(tuple(cells))
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)


def cmd_compare(args):
    try:
        spec = scenarios.load(args.scenario) if args.scenario else scenarios.load_file(args.scenario_file)
    except (LookupFailure, ArgumentError, OSError) as exc:
        raise UsageError(str(exc)) from None
    seed = args.seed if args.seed is not None else _default_seed()
    results = run_scenario(spec, seed)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, (records, _) in results.items():
            with open(out / f"{spec.name}_{name}.csv", "w", newline="") as fh:
                write_csv(fh, records, spec.burn_in, spec.thin)
    if args.format == "json":
        doc = {
            "scenario": spec.name,
            "seed": seed,
            "reports": {name: rep.to_dict() for name, (_, rep) in results.items()},
        }
        print(json.dumps(doc, indent=2))
        return 0
    print(f"scenario {spec.name} (seed {seed}): {spec.description}")
    for name, (_, rep) in results.items():
        print()
        print(rep.to_text(title=name))
    print()
    print(comparison_table(results))
    return 0


def cmd_diagnose(args):
    opts = _report_options(args)
    try:
        with open(args.infile, newline="") as fh:
            records = read_csv(fh, args.max_iter)
    except OSError as exc:
        print(f"slicebox: {exc}", file=sys.stderr)
        return 1
    except ArgumentError as exc:
        print(f"slicebox: {args.infile}: {exc}", file=sys.stderr)
        return 1
    report = summarize(records, opts)
    print(report.to_text(title=args.infile))
    if report.ks_pass is False:
        return 1
    return 0


COMMANDS = {"sample": cmd_sample, "compare": cmd_compare, "diagnose": cmd_diagnose}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"slicebox: error: {exc}", file=sys.stderr)
        return 2
    except SliceboxError as exc:
        print(f"slicebox: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
