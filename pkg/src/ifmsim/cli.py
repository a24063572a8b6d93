"""Command line entry point: ``ifmsim run <scenario-file>``."""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigSyntaxError, ValidationError
from .measurement import measure
from .oracle import compare, oracle_run
from .scenario import canned, canned_names, evolve, load_scenario, render_report, run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2
CHECK_TOL = 1e-12


def build_parser():
    parser = argparse.ArgumentParser(prog="ifmsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario and print its report")
    p.add_argument("scenario", nargs="?", help="scenario file (YAML or JSON)")
    p.add_argument("--canned", metavar="NAME", help="run a bundled scenario instead of a file")
    p.add_argument("--list-canned", action="store_true", help="list bundled scenarios and exit")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument(
        "--check", action="store_true",
        help=f"compare against the dense oracle; exit {EXIT_MISMATCH} on mismatch > {CHECK_TOL:g}",
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.list_canned:
        for name in canned_names():
            print(name)
        return EXIT_OK
    if (args.scenario is None) == (args.canned is None):
        print("error: give exactly one of a scenario file or --canned NAME", file=sys.stderr)
        return EXIT_INVALID
    try:
        sc = canned(args.canned) if args.canned else load_scenario(args.scenario)
    except (ValidationError, ConfigSyntaxError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    report = run(sc)
    data = render_report(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()

    if args.check:
        diff = compare(measure(evolve(sc), sc.detector), oracle_run(sc))
        if diff > CHECK_TOL:
            print(f"oracle mismatch: {diff:.3g} > {CHECK_TOL:g}", file=sys.stderr)
            return EXIT_MISMATCH
        print(f"oracle check passed (max deviation {diff:.3g})", file=sys.stderr)
    return EXIT_OK
