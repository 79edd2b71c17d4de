"""Command-line entry point: ``heptagonal <command> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bounds
from .escalator import escalate, max_truant, nodes_at_depth, truant
from .fixtures import SUITES, run_suite
from .interval import format_outward
from .polygonal import CoeffVector, rep_table, shifted_rep_count

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    precision: int = 256
    scan_limit: int = 10 ** 4
    jobs: int = 1
    out: Path | None = None
    figure: Path | None = None
    cache_dir: Path | None = None
    profile: str = "3/5"

    def __post_init__(self):
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")
        if self.scan_limit < 200:
            raise ValueError("scan limit must be at least 200")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


def _config(args):
    return RunConfig(
        precision=args.precision,
        scan_limit=args.limit if args.limit is not None else 10 ** 4,
        jobs=args.jobs,
        out=Path(args.out) if args.out else None,
        figure=Path(args.figure) if args.figure else None,
        cache_dir=Path(args.cache_dir) if args.cache_dir else None,
        profile=args.profile,
    )


def _coeffs(args, required=True):
    if args.coeffs is None:
        if required:
            raise ValueError("--coeffs is required")
        return None
    return CoeffVector.parse(args.m, args.coeffs)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_truant(args, cfg):
    t = truant(_coeffs(args), cfg.scan_limit)
    print(t if t is not None else f"none <= {cfg.scan_limit}")
    return 0


def cmd_escalate(args, cfg):
    tree = escalate(args.m, args.depth, cfg.scan_limit, jobs=cfg.jobs)
    payload = {"schema_version": SCHEMA_VERSION, "m": args.m, "depth": args.depth, "tree": tree.to_dict()}
    if args.depth is not None:
        payload["nodes"] = [list(a) for a in nodes_at_depth(tree, args.depth)]
    else:
        payload["max_truant"] = max_truant(tree)
    _emit(json.dumps(payload, separators=(",", ":")) + "\n", cfg.out)
    if cfg.figure is not None:
        from .plotting import truant_figure

        truant_figure(tree, cfg.figure)
    return 0


def cmd_count(args, cfg):
    v = _coeffs(args)
    if args.n is None:
        raise ValueError("--n is required")
    if args.shifted:
        f = v.completed_form()
        print(shifted_rep_count(f, args.n))
    else:
        print(rep_table(v, args.n, cfg.cache_dir)[args.n])
    return 0


def _node(args):
    v = _coeffs(args)
    if v.ell != 4:
        raise ValueError("bounds need exactly four coefficients")
    return v.coeffs


def cmd_bounds(args, cfg):
    a = _node(args)
    d = bounds.theorem_d(cfg.precision)
    report = bounds.bound_report(bounds._require_node(a), d, cfg.precision)
    payload = {"schema_version": SCHEMA_VERSION, "report": report.to_json()}
    if args.n is not None:
        profile = bounds.PROFILES[cfg.profile]
        cusp = bounds.cusp_coeff_bound(a, args.n, profile, cfg.precision)
        payload["n"] = args.n
        payload["h"] = bounds.h_value(a, args.n)
        payload["cusp_bound_hi"] = format_outward(cusp.hi, 12)
        if not report.anisotropic:
            lower = bounds.eisenstein_lower(a, args.n, cfg.precision)
            payload["eisenstein_lower_lo"] = format_outward(lower.lo, 12, up=False)
    _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    return 0


def table_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(bounds.CSV_HEADER)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def cmd_table(args, cfg):
    result = bounds.assemble_theorem(prec=cfg.precision)
    _emit(table_csv(result.reports), cfg.out)
    if cfg.figure is not None:
        from .plotting import crossover_figure

        crossover_figure(result.reports, cfg.figure, highlight=result.argmax)
    return 0


def cmd_final_bound(args, cfg):
    result = bounds.assemble_theorem(prec=cfg.precision)
    summary = result.summary()
    print(f"[{summary['bound']['lo']}, {summary['bound']['hi']}] argmax {tuple(result.argmax)}")
    if cfg.out is not None:
        payload = dict(summary, reports=[r.to_json() for r in result.reports])
        _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    return 0


def cmd_verify(args, cfg):
    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} fixtures passed in suite '{args.suite}'")
    return 1 if failed else 0


COMMANDS = {
    "truant": cmd_truant,
    "escalate": cmd_escalate,
    "count": cmd_count,
    "bounds": cmd_bounds,
    "table": cmd_table,
    "final-bound": cmd_final_bound,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=7, help="polygonal order")
    common.add_argument("--coeffs", help="comma separated coefficients, e.g. 1,2,4")
    common.add_argument("--n", type=int)
    common.add_argument("--limit", type=int, help="scan limit for truant searches")
    common.add_argument("--depth", type=int)
    common.add_argument("--precision", type=int, default=256, help="interval precision in bits")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--profile", choices=sorted(bounds.PROFILES), default="3/5")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--figure", help="also render a PNG/PDF figure to this path")
    common.add_argument("--cache-dir", help="directory for cached representation tables")
    common.add_argument("--suite", choices=sorted(SUITES), default="paper")
    common.add_argument("--shifted", action="store_true", help="count on the completed shifted form")

    parser = argparse.ArgumentParser(prog="heptagonal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ValueError, OSError, OverflowError, ArithmeticError) as exc:
        print(f"heptagonal {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
