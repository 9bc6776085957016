"""Command-line front end.

Exit codes: 0 success, 2 invalid state, 3 unparsable input, 4 grid too
large, 5 output not writable, 6 audit disagreements under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .audit import run_audit
from .criteria import all_reports, concurrence, derivation_diagnostics
from .errors import GridTooLarge, UnknownFamily, XRealignError
from .numerics import DEFAULT_TOL, Tolerance
from .scanner import FAMILIES, GridSpec, region_summary, scan, write_csv
from .states import load_state, validate

EXIT_OK = 0
EXIT_INVALID_STATE = 2
EXIT_PARSE_ERROR = 3
EXIT_GRID_TOO_LARGE = 4
EXIT_UNWRITABLE = 5
EXIT_DISAGREEMENT = 6

SUMMARY_CRITERIA = ("valid", "ppt", "ccn", "thm1", "bound")


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "NO"
    return f"{v:.10g}"


def _tolerance(args) -> Tolerance:
    return Tolerance(eps_herm=args.eps_herm, eps_psd=args.eps_psd, eps_eq=args.eps_eq)


def _read_state(path, tol):
    """Load and validate a state file; returns ``(state, exit_code)``."""
    try:
        state = load_state(path, tol)
    except XRealignError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, EXIT_INVALID_STATE
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: cannot parse {path}: {exc}", file=sys.stderr)
        return None, EXIT_PARSE_ERROR
    try:
        validate(state, tol)
    except XRealignError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return None, EXIT_INVALID_STATE
    return state, EXIT_OK


def cmd_analyze(args) -> int:
    tol = _tolerance(args)
    state, code = _read_state(args.input, tol)
    if state is None:
        return code
    reports = all_reports(state, tol)
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], indent=2))
        return EXIT_OK
    header = ("criterion", "verdict", "lhs", "rhs", "margin", "branch")
    rows = [
        (r.criterion.value, r.verdict.value, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.margin), r.branch.value)
        for r in reports
    ]
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]
    for row in [header, *rows]:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    print(f"concurrence = {_fmt(concurrence(state, tol))}")
    return EXIT_OK


def _parse_slice(text: str):
    axis, _, value = text.partition("=")
    axis = axis.strip().lower()
    if axis not in ("x", "y") or not value:
        raise argparse.ArgumentTypeError(f"slice must look like x=0.1 or y=0.2, got {text!r}")
    return axis, float(value)


def _summary_text(summary, step) -> list[str]:
    counts = ", ".join(f"{k}={v}" for k, v in summary.counts.items())
    lines = [f"[{summary.criterion}] {counts}"]
    by_axis: dict[str, list] = {}
    for b in summary.boundary_estimates:
        by_axis.setdefault(b.axis, []).append(b)
    for axis, items in by_axis.items():
        other = "y" if axis == "x" else "x"
        if len(items) <= 8:
            for b in items:
                lines.append(f"  boundary along {axis} at {other}={b.fixed:.6g}: {b.value:.6g} ± {step:.3g}")
        else:
            values = [b.value for b in items]
            lines.append(
                f"  boundary along {axis}: {len(items)} lines, "
                f"{min(values):.6g} .. {max(values):.6g} (each ± {step:.3g})"
            )
    if not summary.boundary_estimates:
        lines.append("  no transition on any grid line")
    return lines


def cmd_scan(args) -> int:
    tol = _tolerance(args)
    x_min, x_max, y_min, y_max = args.x_min, args.x_max, args.y_min, args.y_max
    if args.slice is not None:
        axis, value = args.slice
        if axis == "x":
            x_min = x_max = value
        else:
            y_min = y_max = value
    try:
        grid = GridSpec(x_min, x_max, y_min, y_max, args.step)
    except GridTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID_TOO_LARGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    try:
        records = scan(args.family, grid, tol, workers=args.workers)
    except UnknownFamily as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    out = args.out or f"{args.family}_scan.csv"
    try:
        write_csv(records, out)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE

    summaries = [region_summary(records, c) for c in SUMMARY_CRITERIA]
    if args.format == "json":
        print(
            json.dumps(
                {"family": args.family, "points": len(records), "csv": str(out), "step": args.step,
                 "summaries": [s.to_dict() for s in summaries]},
                indent=2,
            )
        )
    else:
        print(f"scanned {len(records)} points of {args.family!r}, step {args.step:g}; CSV written to {out}")
        for s in summaries:
            print("\n".join(_summary_text(s, args.step)))
    return EXIT_OK


def cmd_audit(args) -> int:
    tol = _tolerance(args)
    if args.samples < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_PARSE_ERROR
    summary = run_audit(args.samples, args.seed, tol)
    if summary.disagreements:
        dump = args.out or "audit_disagreements.json"
        try:
            Path(dump).write_text(json.dumps(summary.disagreements, indent=2) + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {dump}: {exc}", file=sys.stderr)
            return EXIT_UNWRITABLE
    if args.format == "json":
        print(summary.to_json())
    else:
        for key, value in summary.to_dict().items():
            if key == "derivation_failures":
                value = ", ".join(f"({k}): {n}" for k, n in value.items()) or "none"
            print(f"{key:28s} {value}")
    if summary.disagreements and args.strict:
        return EXIT_DISAGREEMENT
    return EXIT_OK


def cmd_diagnose(args) -> int:
    tol = _tolerance(args)
    state, code = _read_state(args.input, tol)
    if state is None:
        return code
    report = derivation_diagnostics(state, tol)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return EXIT_OK
    print(f"branch {report.branch.value}: P = {_fmt(report.P)}, Q = {_fmt(report.Q)}, S = {_fmt(report.S)}")
    for c in report.checks:
        status = ("holds" if c.holds else "FAILS") if c.applicable else (
            "n/a (holds)" if c.holds else "n/a (fails)"
        )
        print(f"  ({c.eq:>7s})  lhs = {_fmt(c.lhs):>14s}  rhs = {_fmt(c.rhs):>14s}  {status}")
    applicable = [c for c in report.checks if c.applicable]
    print(f"{sum(c.holds for c in applicable)}/{len(applicable)} applicable checks hold")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("json", "text"), default="text")
    shared.add_argument("--eps-herm", type=float, default=DEFAULT_TOL.eps_herm)
    shared.add_argument("--eps-psd", type=float, default=DEFAULT_TOL.eps_psd)
    shared.add_argument("--eps-eq", type=float, default=DEFAULT_TOL.eps_eq)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", default=None, help="output path (CSV for scan, dump file for audit)")

    parser = argparse.ArgumentParser(prog="xrealign", description="Entanglement criteria for two-qubit X-states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[shared], help="classify one state file")
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", parents=[shared], help="grid-scan a state family to CSV")
    p.add_argument("--family", default="rho1", choices=sorted(FAMILIES))
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=0.25)
    p.add_argument("--y-min", type=float, default=0.0)
    p.add_argument("--y-max", type=float, default=0.25)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--slice", type=_parse_slice, default=None, metavar="AXIS=VALUE")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("audit", parents=[shared], help="random-ensemble audit")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--strict", action="store_true", help="exit 6 when the modified bound fails on any entangled sample")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("diagnose", parents=[shared], help="evaluate the derivation chain on one state")
    p.add_argument("input")
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        Tolerance(args.eps_herm, args.eps_psd, args.eps_eq)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
