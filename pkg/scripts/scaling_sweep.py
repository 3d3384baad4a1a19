#!/usr/bin/env python3
"""Queue-size scaling sweep: mean total queue across a grid of system
scales at fixed load, per policy.  Feeds `plotkit scaling`."""

import argparse

from switchsim.experiments import SweepConfig, run_sweep, sweep_records_to_csv
from switchsim.params import ADAPTIVE_PRESET


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    parser.add_argument("--rho", type=float, default=0.8)
    parser.add_argument("--policies", nargs="+",
                        default=["lower-envelope", "max-weight"])
    parser.add_argument("--batches", type=int, default=10)
    parser.add_argument("--replications", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default="scaling.csv")
    args = parser.parse_args()

    records = []
    for policy in args.policies:
        config = SweepConfig(
            grid=[(n, args.rho) for n in args.sizes],
            policy=policy,
            horizon_batches=args.batches,
            replications=args.replications,
            seed=args.seed,
            constants=ADAPTIVE_PRESET,
        )
        records.extend(run_sweep(config, jobs=args.jobs))
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(sweep_records_to_csv(records))
    print(f"wrote {len(records)} rows to {args.out}")


if __name__ == "__main__":
    main()
