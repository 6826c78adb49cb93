"""Command line entry point.

    ulrrm run --config cfg.txt --sweep K=1,2,3 --solutions B,S0 \
              --realizations 50 --seed 7 --out results/

writes ``sweep.csv`` and ``run_meta.json`` into the output directory and
optionally a per-slot ``trace.jsonl``.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

from .config import (SOLUTIONS, SweepPlan, desk_scale_config,
                     full_scale_config, load_config_file, validate)
from .harness import TraceWriter, run_sweep, write_run_meta, write_sweep_csv


def _parse_sweep(text: str) -> tuple[str, tuple[int, ...]]:
    if "=" not in text:
        raise ValueError("--sweep expects AXIS=v1,v2,... (e.g. K=1,2,3)")
    axis, _, values = text.partition("=")
    axis = axis.strip()
    try:
        parsed = tuple(int(tok) for tok in values.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"--sweep values must be integers: {exc}") from None
    if not parsed:
        raise ValueError("--sweep needs at least one value")
    return axis, parsed


def _parse_solutions(text: str) -> tuple[str, ...]:
    names = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    unknown = [s for s in names if s not in SOLUTIONS]
    if unknown:
        raise ValueError(f"unknown solutions {unknown}; "
                         f"choose from {', '.join(SOLUTIONS)}")
    if not names:
        raise ValueError("--solutions needs at least one name")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulrrm",
        description="Uplink RRM simulator: sweep GM throughput over K or U.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a sweep and write sweep.csv")
    run_p.add_argument("--config", help="key=value config file")
    run_p.add_argument("--profile", choices=("full", "desk"), default="full",
                       help="base parameter profile (default: full)")
    run_p.add_argument("--sweep", required=True, metavar="AXIS=V1,V2,...",
                       help="sweep axis and values, e.g. K=1,2,3 or U=6,12")
    run_p.add_argument("--solutions", default=",".join(SOLUTIONS),
                       help="comma-separated subset of " + ",".join(SOLUTIONS))
    run_p.add_argument("--realizations", type=int, default=50)
    run_p.add_argument("--seed", type=int, default=None,
                       help="master seed (default: config rng_seed)")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--workers", type=int, default=1,
                       help="parallel realization workers")
    run_p.add_argument("--trace", action="store_true",
                       help="also write per-slot trace.jsonl (forces serial)")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    base = desk_scale_config() if args.profile == "desk" else full_scale_config()
    if args.config:
        base = load_config_file(args.config, base)
    if args.seed is not None:
        base = dataclasses.replace(base, rng_seed=args.seed)

    axis, values = _parse_sweep(args.sweep)
    solutions = _parse_solutions(args.solutions)
    plan = SweepPlan(sweep_axis=axis, axis_values=values,
                     num_realizations=args.realizations,
                     base_config=base, solutions=solutions)
    problems = validate(base)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))

    os.makedirs(args.out, exist_ok=True)
    started = time.monotonic()
    if args.trace:
        with TraceWriter(os.path.join(args.out, "trace.jsonl")) as sink:
            result = run_sweep(plan, workers=args.workers, trace_sink=sink)
    else:
        result = run_sweep(plan, workers=args.workers)
    elapsed = time.monotonic() - started

    write_sweep_csv(os.path.join(args.out, "sweep.csv"), result)
    write_run_meta(os.path.join(args.out, "run_meta.json"), result,
                   elapsed_s=elapsed, workers=args.workers)
    print(f"wrote {os.path.join(args.out, 'sweep.csv')} "
          f"({len(result.values) * len(result.solutions)} rows, "
          f"{elapsed:.1f}s)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        parser.error(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
