"""Command-line front end: load an instance, solve, write reports."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .branchprice import STATUS_OPTIMAL, SolverConfig, solve
from .fileio import ParseError, parse_edgelist, parse_gml_subset, write_iteration_log, write_report
from .graphs import GraphError, brute_force_optimum, modularity, modularity_density

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2

BRUTE_FORCE_CAP = 12


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; we reserve 2 for timeouts
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _onoff(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="moddens", description="Exact modularity density maximization")
    p.add_argument("--input", required=True, help="instance file")
    p.add_argument("--format", choices=["edgelist", "gml"], default=None,
                   help="input format (default: guessed from the extension)")
    p.add_argument("--spr", type=_onoff, default=True, metavar="on|off",
                   help="set-packing relaxation (default on)")
    p.add_argument("--mcp", type=_onoff, default=True, metavar="on|off",
                   help="multiple cutting planes per pricing round (default on)")
    p.add_argument("--pricing", choices=["first-incumbent", "prove-optimal"],
                   default="first-incumbent", help="pricing search mode")
    p.add_argument("--time-limit", type=float, default=3600.0, metavar="SECONDS")
    p.add_argument("--output", default=None, help="write the structured report here")
    p.add_argument("--log", default=None, help="write per-iteration rows here")
    p.add_argument("--brute-force-check", action="store_true",
                   help=f"verify against exhaustive enumeration (n <= {BRUTE_FORCE_CAP} only)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    path = Path(args.input)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    fmt = args.format
    if fmt is None:
        fmt = "gml" if path.suffix.lower() == ".gml" else "edgelist"
    try:
        if fmt == "gml":
            g, labels = parse_gml_subset(text)
        else:
            g, labels = parse_edgelist(text)
    except (ParseError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.brute_force_check and g.n > BRUTE_FORCE_CAP:
        print(f"error: --brute-force-check needs n <= {BRUTE_FORCE_CAP}, got n={g.n}",
              file=sys.stderr)
        return EXIT_ERROR

    cfg = SolverConfig(
        spr_enabled=args.spr,
        mcp_enabled=args.mcp,
        time_limit=args.time_limit,
        pricing_mode=args.pricing.replace("-", "_"),
    )
    try:
        rep = solve(g, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.brute_force_check:
        _, bf_value = brute_force_optimum(g, BRUTE_FORCE_CAP)
        if rep.status == STATUS_OPTIMAL and abs(bf_value - rep.objective) > 1e-7:
            print(f"error: brute-force check failed: solver {rep.objective!r} "
                  f"vs enumeration {bf_value!r}", file=sys.stderr)
            return EXIT_ERROR
        print(f"brute-force check: enumeration D = {bf_value!r}")

    part = rep.partition
    # communities ordered by their smallest vertex, members in id order
    comms = sorted(part.communities, key=lambda c: min(c.members))
    fields = {
        "instance": path.name,
        "input_format": fmt,
        "n": g.n,
        "m": g.m,
        "spr": "on" if args.spr else "off",
        "mcp": "on" if args.mcp else "off",
        "pricing": args.pricing,
        "time_limit": args.time_limit,
        "status": rep.status,
        "D": f"{rep.objective:.5f}",
        "D_full": rep.objective,
        "Q_full": modularity(g, part) if g.m else 0.0,
        "communities": len(part),
        "nodes_processed": rep.nodes_processed,
        "cg_iterations": rep.cg_iterations,
        "columns_total": rep.columns_total,
        "equality_rows": rep.equality_set_size,
        "wall_seconds": round(rep.wall_time, 3),
    }
    report_text = write_report(
        fields, ([labels[v] for v in c.sorted_members()] for c in comms)
    )
    if args.output:
        Path(args.output).write_text(report_text)
    else:
        sys.stdout.write(report_text)
    if args.log:
        Path(args.log).write_text(write_iteration_log(rep.events))

    # re-score as an internal consistency guard
    rescored = modularity_density(g, part)
    if abs(rescored - rep.objective) > 1e-9:
        print("error: reported objective does not re-score", file=sys.stderr)
        return EXIT_ERROR

    return EXIT_OK if rep.status == STATUS_OPTIMAL else EXIT_TIMEOUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
