"""Command-line entry point: ``nk-muddle run | plot | oracle | landscape export``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .experiments import ReplicationError, SpecError, run_experiment
from .io import parse_spec, write_result
from .landscape import SCHEMES, Landscape, build_landscape
from .oracle import brute_force_optimum
from .plotting import METRICS, PlotSpec, plot
from .search import DEFAULT_TAU_GRID

OUT_DIR_ENV = "NK_MUDDLE_OUT_DIR"


def _default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "nk_muddle_out"))


def _progress(done: int, total: int) -> None:
    if done == total or done % max(1, total // 100) == 0:
        print(f"\r{done}/{total} cells", end="\n" if done == total else "", file=sys.stderr, flush=True)


def cmd_run(args) -> int:
    spec = parse_spec(args.spec)
    if args.replications is not None:
        spec = dataclasses.replace(spec, replications=args.replications)
    start = time.perf_counter()
    result = run_experiment(
        spec,
        worker_count=args.workers,
        normalize=args.normalize,
        trace=args.trace,
        progress=_progress if sys.stderr.isatty() else None,
    )
    metadata = {
        "software_version": __version__,
        "paired_initial_configs": True,
        "pu_default_tau_grid": list(DEFAULT_TAU_GRID),
        "pu_generations_per_tau": spec.budget,
        "normalize": args.normalize,
        "trace": args.trace,
        "nondeterministic": {"wall_time_seconds": time.perf_counter() - start, "workers": args.workers},
    }
    for p in write_result(result, args.out_dir, metadata):
        print(p)
    return 0


def cmd_plot(args) -> int:
    series = tuple(s for s in args.series.split(",") if s) if args.series else ()
    out = plot(PlotSpec(args.metric, series, Path(args.input), Path(args.output), args.title or ""))
    print(out)
    return 0


def _landscape_from_args(args) -> Landscape:
    if getattr(args, "landscape", None):
        return Landscape.load(args.landscape)
    return build_landscape(args.seed, args.n, args.k, args.scheme)


def cmd_oracle(args) -> int:
    report = brute_force_optimum(_landscape_from_args(args))
    text = json.dumps(report.to_dict(), indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_landscape_export(args) -> int:
    ls = build_landscape(args.seed, args.n, args.k, args.scheme)
    if args.output:
        ls.save(args.output)
    else:
        sys.stdout.write(json.dumps(ls.to_dict(), indent=1) + "\n")
    return 0


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--scheme", choices=SCHEMES, default="random")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nk-muddle", description="NK landscape search experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment spec")
    p.add_argument("spec", help="JSON experiment spec")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--replications", type=int, default=None, help="override the spec's replication count")
    p.add_argument("--out-dir", type=Path, default=None, help=f"output directory (default ${OUT_DIR_ENV} or ./nk_muddle_out)")
    p.add_argument("--normalize", action="store_true", help="divide fitness by the brute-force optimum (n <= 24)")
    p.add_argument("--trace", action="store_true", help="write per-step traces to traces.csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="SVG chart of an aggregate metric against K")
    p.add_argument("input", help="aggregates.csv or aggregates.json")
    p.add_argument("--metric", default="fitness", help=f"one of {', '.join(METRICS)}")
    p.add_argument("--series", default="", help="comma-separated algorithm ids (default: all)")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("oracle", help="brute-force optimum and local-optimum count")
    _add_instance_args(p)
    p.add_argument("--landscape", help="landscape JSON file instead of --seed/--n/--k")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("landscape", help="landscape utilities")
    lsub = p.add_subparsers(dest="landscape_command", required=True)
    e = lsub.add_parser("export", help="write a landscape as JSON")
    _add_instance_args(e)
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_landscape_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "out_dir", "unset") is None:
        args.out_dir = _default_out_dir()
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    if getattr(args, "replications", None) is not None and args.replications < 1:
        print("error: --replications must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SpecError, ReplicationError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
