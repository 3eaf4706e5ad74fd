"""Command-line interface: ``reebrecon {reconstruct,compare,synth,verify}``.

Exit codes: 0 success, 2 invalid arguments, 3 input/output problems,
4 data too sparse or degenerate to reconstruct.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geo
from .errors import DegenerateDataError, InputError
from .experiments import SUITES
from .metric_graph import write_graph
from .synth import NoisySampleSpec, sample_graph, standard_fixtures

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DEGENERATE = 0, 2, 3, 4

log = logging.getLogger("reebrecon")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text}")
    return value


def _nonnegative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value >= 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be nonnegative and finite: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reebrecon", description="Reeb-graph reconstruction of filamentary "
                "structures from noisy samples, with a hypocenter-catalog pipeline.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reconstruct", help="reconstruct slab contours from a catalog")
    r.add_argument("--input", type=Path, default=None,
                   help="catalog CSV (default: the bundled synthetic South-America extract)")
    r.add_argument("--min-depth", type=float, default=60.0, help="km, inclusive (default 60)")
    r.add_argument("--min-mag", type=float, default=4.0, help="strict lower bound (default 4)")
    r.add_argument("--slice-start", type=float, default=60.0, help="km (default 60)")
    r.add_argument("--slice-width", type=_positive, default=20.0, help="km (default 20)")
    r.add_argument("--slice-end", type=float, default=None,
                   help="only reconstruct slices starting above this depth (km)")
    r.add_argument("--eta", type=_positive, required=True, help="Rips scale, km")
    r.add_argument("--alpha", type=_positive, required=True, help="Reeb interval length, km")
    r.add_argument("--sigma", type=_positive, required=True,
                   help="smoothing bandwidth, km; must be < alpha/4")
    r.add_argument("--overlap", type=float, default=0.5, help="cover overlap in [0.25, 0.5]")
    base = r.add_mutually_exclusive_group()
    base.add_argument("--base-index", type=int, default=None,
                      help="basepoint index within the largest Rips component")
    base.add_argument("--seed", type=int, default=None, help="draw the basepoint at random")
    r.add_argument("--epsilon", type=_nonnegative, default=None,
                   help="km; when given, the GH bound is reported per slice")
    r.add_argument("--r-cap", type=_positive, default=500.0,
                   help="R of the (epsilon, R)-approximation used in the bound (default 500)")
    r.add_argument("--keep-bumps", action="store_true",
                   help="embed vertex-free leaf nodes of the Reeb graph too")
    r.add_argument("--samples", type=int, default=16, help="points per embedded Reeb edge")
    r.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
    r.add_argument("--slab", type=Path, default=None,
                   help="slab contours; adds Hausdorff distances to the diagnostics")
    r.add_argument("--output", type=Path, required=True, help="GeoJSON output path")
    r.add_argument("--diagnostics", type=Path, default=None,
                   help="diagnostics CSV path (default: standard output)")

    c = sub.add_parser("compare", help="compare a reconstruction with a slab contour")
    c.add_argument("--recon", type=Path, required=True, help="GeoJSON from reconstruct")
    c.add_argument("--slab", type=Path, default=None,
                   help="contours (default: the bundled synthetic contours)")
    c.add_argument("--depth", type=float, required=True, help="contour depth, km")

    s = sub.add_parser("synth", help="write a noisy sample of a standard fixture")
    s.add_argument("--fixture", required=True, choices=sorted(standard_fixtures()))
    s.add_argument("--rho", type=_nonnegative, required=True, help="noise radius")
    s.add_argument("--spacing", type=_positive, required=True, help="arc-length spacing")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", type=Path, default=None,
                   help="point file, one point per line (default: standard output)")
    s.add_argument("--graph-output", type=Path, default=None,
                   help="also write the fixture graph in the text graph format")

    v = sub.add_parser("verify", help="run an empirical check suite and print a table")
    v.add_argument("suite", help="one of: " + ", ".join(sorted(SUITES)))
    return p


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING - 10 * min(verbosity, 2)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("reebrecon")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def _cmd_reconstruct(args) -> int:
    try:
        params = geo.PipelineParams(args.eta, args.alpha, args.sigma, args.overlap,
                                    args.base_index, args.seed, args.epsilon, args.r_cap,
                                    args.samples, not args.keep_bumps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if args.threads < 0:
        raise UsageError("--threads must be >= 0")
    threads = args.threads or os.cpu_count() or 1
    path = args.input
    if path is None:
        path = geo.BUNDLED_CATALOG
        log.warning("no --input given; using the bundled SYNTHETIC catalog %s", path)
    catalog = geo.ingest_catalog(path, args.min_depth, args.min_mag)
    contours = geo.load_slab_contours(args.slab) if args.slab else None
    result = geo.run_pipeline(catalog, args.slice_start, args.slice_width, params, threads,
                              slice_end=args.slice_end)
    geo.pipeline_geojson(result, args.output)
    comparisons = {}
    if contours:
        for s in result.reconstructed:
            centre = (s.slice.lo + s.slice.hi) / 2.0
            match = [c for d, c in contours.items() if s.slice.lo <= d < s.slice.hi]
            if not match:
                continue
            best = min(match, key=lambda c: abs(c.depth - centre))
            comparisons[s.slice.index] = geo.compare_to_slab(
                geo.embedding_lines(s.reconstruction.embedding), best, result.projection)
    rows = geo.diagnostics_rows(result, comparisons)
    if args.diagnostics:
        try:
            with open(args.diagnostics, "w", newline="") as fh:
                geo.write_diagnostics(rows, fh)
        except OSError as exc:
            raise InputError(f"cannot write {args.diagnostics}: {exc}") from exc
    else:
        geo.write_diagnostics(rows, sys.stdout)
    log.info("wrote %s (%d slices reconstructed)", args.output, len(result.reconstructed))
    return EXIT_OK


def _cmd_compare(args) -> int:
    recon = geo.read_recon_geojson(args.recon)
    slab = args.slab or geo.BUNDLED_CONTOURS
    contour = geo.select_contour(geo.load_slab_contours(slab), args.depth)
    lines = recon.lines_for_depth(args.depth)
    if not lines:
        raise DegenerateDataError(f"{args.recon} has no features for depth {args.depth:g} km")
    report = geo.compare_to_slab(lines, contour, recon.projection)
    json.dump(report.as_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_synth(args) -> int:
    fx = standard_fixtures()[args.fixture]
    sample = sample_graph(NoisySampleSpec(fx.graph, 1.0 / args.spacing, args.rho, args.seed))
    header = (f"{args.fixture} sample: {len(sample.cloud)} points, rho={args.rho!r}, "
              f"spacing={sample.spacing!r}, seed={args.seed}, "
              f"hausdorff bound {sample.hausdorff_bound!r}")
    try:
        if args.output:
            np.savetxt(args.output, sample.cloud.points, fmt="%.17g", header=header)
        else:
            np.savetxt(sys.stdout, sample.cloud.points, fmt="%.17g", header=header)
        if args.graph_output:
            write_graph(fx.graph, args.graph_output)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    log.info(header)
    return EXIT_OK


def _cmd_verify(args) -> int:
    suite = SUITES.get(args.suite)
    if suite is None:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    rows = suite()
    width = max(len(r.name) for r in rows)
    print(f"{'case':<{width}}  result  detail")
    for r in rows:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    return EXIT_OK if all(r.passed for r in rows) else 1


COMMANDS = {"reconstruct": _cmd_reconstruct, "compare": _cmd_compare,
            "synth": _cmd_synth, "verify": _cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"reebrecon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except DegenerateDataError as exc:
        log.error("%s", exc)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
