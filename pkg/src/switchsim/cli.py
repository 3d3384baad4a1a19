"""Command-line interface: simulate, sweep, factor and clear subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    SweepConfig,
    factor_experiment,
    factor_records_to_csv,
    run_sweep,
    simulate_one,
    sweep_config_from_json,
    sweep_records_to_csv,
)
from .factorization import optimal_clearing_schedule
from .matrices import format_matching_sequence, parse_matrix
from .params import (
    ADAPTIVE,
    ADAPTIVE_PRESET,
    THEORETICAL,
    THEORETICAL_PRESET,
    PolicyConstants,
    parse_constants,
)
from .policies import POLICY_NAMES


def _load_constants(path: str | None, mode: str | None) -> PolicyConstants:
    if path is not None:
        with open(path, encoding="utf-8") as handle:
            constants = parse_constants(handle.read())
        if mode is not None and mode != constants.mode:
            from dataclasses import replace

            constants = replace(constants, mode=mode)
        return constants
    if mode == THEORETICAL:
        return THEORETICAL_PRESET
    return ADAPTIVE_PRESET


def _batch_trace_path(trace_path: str) -> Path:
    path = Path(trace_path)
    return path.with_name(path.stem + ".batches" + (path.suffix or ".csv"))


def _cmd_simulate(args: argparse.Namespace) -> int:
    constants = _load_constants(args.constants, args.mode)
    record, trace = simulate_one(
        args.policy,
        args.n,
        args.rho,
        args.horizon_batches,
        args.seed,
        constants,
    )
    Path(args.out).write_text(sweep_records_to_csv([record]), encoding="utf-8")
    if args.trace:
        Path(args.trace).write_text(trace.to_slot_csv(), encoding="utf-8")
        _batch_trace_path(args.trace).write_text(trace.to_batch_csv(), encoding="utf-8")
    if record.policy != args.policy:
        print(f"note: {record.policy}", file=sys.stderr)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = sweep_config_from_json(Path(args.config).read_text(encoding="utf-8"))
    records = run_sweep(config, jobs=args.jobs)
    Path(args.out).write_text(sweep_records_to_csv(records), encoding="utf-8")
    return 0


def _cmd_factor(args: argparse.Namespace) -> int:
    records = factor_experiment(args.n, args.m, args.p, args.f, args.trials, args.seed)
    Path(args.out).write_text(factor_records_to_csv(records), encoding="utf-8")
    return 0


def _cmd_clear(args: argparse.Namespace) -> int:
    matrix = parse_matrix(Path(args.matrix).read_text(encoding="utf-8"))
    schedules = optimal_clearing_schedule(matrix)
    Path(args.out).write_text(format_matching_sequence(schedules), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchsim",
        description="Input-queued switch simulator and factorization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run one seeded simulation")
    simulate.add_argument("--policy", required=True, choices=POLICY_NAMES)
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--rho", type=float, required=True)
    simulate.add_argument("--horizon-batches", type=int, required=True)
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--constants", default=None, help="constants file path")
    simulate.add_argument("--mode", choices=(THEORETICAL, ADAPTIVE), default=None)
    simulate.add_argument("--trace", default=None, help="per-slot trace CSV path")
    simulate.add_argument("--out", required=True)
    simulate.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a (n, rho) x replications grid")
    sweep.add_argument("--config", required=True, help="JSON sweep configuration")
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=_cmd_sweep)

    factor = sub.add_parser("factor", help="random multigraph factor thresholds")
    factor.add_argument("--n", type=int, required=True)
    factor.add_argument("--m", type=int, required=True)
    factor.add_argument("--p", type=float, required=True)
    factor.add_argument("--f", type=float, required=True)
    factor.add_argument("--trials", type=int, required=True)
    factor.add_argument("--seed", type=int, required=True)
    factor.add_argument("--out", required=True)
    factor.set_defaults(func=_cmd_factor)

    clear = sub.add_parser("clear", help="optimal clearing schedule of a matrix file")
    clear.add_argument("--matrix", required=True)
    clear.add_argument("--out", required=True)
    clear.set_defaults(func=_cmd_clear)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
