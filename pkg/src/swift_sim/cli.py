"""Command-line entry point.

    swift-sim run --config FILE [--seed S] [--threads N] [--out DIR]
    swift-sim validate --config FILE
    swift-sim run --config FILE --dry-run
    swift-sim --list-schemes
"""
from __future__ import annotations

import argparse
import sys

from .config import SWIFT_SCHEMES, config_from_file
from .harness import run_experiment, write_results


def _print_schemes() -> None:
    for name in SWIFT_SCHEMES:
        print(name)
    print("es")
    print("fnrb-<slots>   (e.g. fnrb-60)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="swift-sim",
        description="Monte Carlo simulator for adaptive random-beam mmWave channel estimation",
    )
    p.add_argument("--list-schemes", action="store_true", help="print known scheme names and exit")
    sub = p.add_subparsers(dest="command")

    run = sub.add_parser("run", help="run an experiment sweep")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--seed", type=int, default=None, help="override master seed")
    run.add_argument("--threads", type=int, default=1, help="trial-level worker processes")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--dry-run", action="store_true", help="validate and print the resolved config only")
    run.add_argument("--quiet", action="store_true", help="suppress progress output")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("--config", required=True, help="experiment config file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_schemes:
        _print_schemes()
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        overrides = {}
        if getattr(args, "seed", None) is not None:
            overrides["master_seed"] = args.seed
        cfg = config_from_file(args.config, overrides=overrides)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.command == "validate":
        print("config ok")
        return 0
    if args.dry_run:
        print(cfg.to_json())
        return 0
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 1

    progress = None
    if not args.quiet:
        def progress(done, total):
            if done % 50 == 0 or done == total:
                print(f"\r{done}/{total} trials", end="", file=sys.stderr, flush=True)

    try:
        result = run_experiment(cfg, threads=args.threads, progress=progress)
        if not args.quiet:
            print(file=sys.stderr)
        paths = write_results(result, args.out)
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for k in ("results", "cdf", "config"):
        print(paths[k])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
