"""Experiment harness: seeded parameter sweeps, the random-multigraph
factor-threshold experiment, and flat-CSV persistence.

Row seeds derive deterministically from (base seed, grid index), so output
files depend only on the configuration, never on execution order or the
number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .factorization import largest_envelope
from .matrices import QueueMatrix
from .params import ADAPTIVE_PRESET, InvalidRegimeError, PolicyConstants, derive_params
from .policies import LowerEnvelopePolicy, MaxWeightPolicy, StandardBatchingPolicy
from .switch import MetricsTrace, run

FACTOR_HYPOTHESIS_COEFF = 152.0
FACTOR_SLACK_COEFF = 304.0

SWEEP_HEADER = [
    "n",
    "rho",
    "policy",
    "seed",
    "horizon_slots",
    "mean_total_queue",
    "max_total_queue",
    "waste_slots",
    "idle_slots",
    "batches_with_positive_U",
    "mean_B",
]

FACTOR_HEADER = ["n", "m", "p", "trial", "seed", "beta_star", "beta0", "success"]


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    rho: float
    policy: str
    seed: int
    horizon_slots: int
    mean_total_queue: float
    max_total_queue: int
    waste_slots: int
    idle_slots: int
    batches_with_positive_U: int
    mean_B: float


@dataclass(frozen=True)
class FactorRecord:
    n: int
    m: int
    p: float
    trial: int
    seed: int
    beta_star: int
    beta0: int
    success: bool


@dataclass
class SweepConfig:
    grid: list[tuple[int, float]]  # (n, rho) pairs
    policy: str
    horizon_batches: int
    replications: int
    seed: int
    constants: PolicyConstants = field(default_factory=lambda: ADAPTIVE_PRESET)
    batch_len: int | None = None  # standard-batching only; default: derived b

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.horizon_batches < 1:
            raise ValueError("horizon must be at least one batch")


def beta_threshold(p: float, m: int, n: int, f: float) -> int:
    """floor(pmn - sqrt(304 pmn log f)), the guaranteed envelope size."""
    pmn = p * m * n
    return math.floor(pmn - math.sqrt(FACTOR_SLACK_COEFF * pmn * math.log(f)))


def factor_experiment(
    n: int, m: int, p: float, f: float, trials: int, seed: int
) -> list[FactorRecord]:
    """Sample random queue matrices with Binomial(m, p) entries and compare
    their largest envelope against the threshold beta0.

    Warns (not errors) when pmn < 152 log f, where the threshold carries no
    guarantee.
    """
    if f < n:
        raise ValueError("requires f >= n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 0 or trials < 1:
        raise ValueError("m must be non-negative and trials positive")
    pmn = p * m * n
    if pmn < FACTOR_HYPOTHESIS_COEFF * math.log(f):
        print(
            f"warning: pmn = {pmn:.1f} < 152 log f = "
            f"{FACTOR_HYPOTHESIS_COEFF * math.log(f):.1f}; "
            "threshold guarantee does not apply",
            file=sys.stderr,
        )
    beta0 = beta_threshold(p, m, n, f)
    records = []
    for trial in range(trials):
        gen = Generator(Philox(SeedSequence(entropy=seed, spawn_key=(trial,))))
        sample = QueueMatrix(gen.binomial(m, p, size=(n, n)).astype(np.int64))
        beta_star = largest_envelope(sample).beta
        records.append(
            FactorRecord(
                n=n,
                m=m,
                p=p,
                trial=trial,
                seed=seed,
                beta_star=beta_star,
                beta0=beta0,
                success=beta_star >= beta0,
            )
        )
    return records


def build_policy(
    name: str,
    n: int,
    rho: float,
    constants: PolicyConstants,
    batch_len: int | None = None,
):
    """Policy factory for the registry names; may raise InvalidRegimeError."""
    if name == "lower-envelope":
        return LowerEnvelopePolicy(derive_params(n, rho, constants))
    if name == "max-weight":
        return MaxWeightPolicy(n)
    if name == "standard-batching":
        if batch_len is None:
            f = max(float(n), 1.0 / (1.0 - rho))
            batch_len = math.ceil(constants.c_b * (1.0 - rho) ** -2.0 * math.log(f))
        return StandardBatchingPolicy(n, rho, batch_len)
    raise ValueError(f"unknown policy {name!r}")


def horizon_slots_for(
    n: int, rho: float, constants: PolicyConstants, horizon_batches: int
) -> int:
    """K batches plus the accumulation delay, so K service periods finish."""
    f = max(float(n), 1.0 / (1.0 - rho))
    log_f = math.log(f)
    b = math.ceil(constants.c_b * (1.0 - rho) ** -2.0 * log_f)
    d = math.ceil(constants.c_d * (1.0 - rho) ** (-4.0 / 3.0) * log_f)
    return horizon_batches * b + d


def summarize_trace(trace: MetricsTrace) -> ExperimentRecord:
    positive_U = sum(1 for row in trace.batches if row.U > 0)
    mean_B = (
        float(np.mean([row.B for row in trace.batches])) if trace.batches else 0.0
    )
    return ExperimentRecord(
        n=trace.n,
        rho=trace.rho,
        policy=trace.policy,
        seed=trace.seed,
        horizon_slots=trace.horizon,
        mean_total_queue=float(np.mean(trace.total_queue)),
        max_total_queue=int(max(trace.total_queue)),
        waste_slots=trace.waste_slots(),
        idle_slots=trace.idle[-1],
        batches_with_positive_U=positive_U,
        mean_B=mean_B,
    )


def simulate_one(
    policy_name: str,
    n: int,
    rho: float,
    horizon_batches: int,
    seed: int,
    constants: PolicyConstants,
    *,
    replication: int = 0,
    batch_len: int | None = None,
    check_conservation: bool = False,
) -> tuple[ExperimentRecord, MetricsTrace]:
    """One seeded run; lower-envelope falls back to Max-Weight on invalid
    regimes, with the substitution marked in the policy column."""
    label = policy_name
    try:
        policy = build_policy(policy_name, n, rho, constants, batch_len)
    except InvalidRegimeError:
        policy = build_policy("max-weight", n, rho, constants)
        label = f"{policy_name}[fallback:max-weight]"
    horizon = horizon_slots_for(n, rho, constants, horizon_batches)
    trace = run(
        policy,
        n,
        rho,
        horizon,
        seed,
        replication=replication,
        check_conservation=check_conservation,
    )
    trace.policy = label
    return summarize_trace(trace), trace


def _sweep_task(args) -> ExperimentRecord:
    index, n, rho, config_policy, horizon_batches, seed, constants, batch_len = args
    record, _ = simulate_one(
        config_policy,
        n,
        rho,
        horizon_batches,
        seed,
        constants,
        replication=index,
        batch_len=batch_len,
    )
    return record


def run_sweep(config: SweepConfig, jobs: int = 1) -> list[ExperimentRecord]:
    """Run the full (n, rho) x replications grid in configuration order.

    Each row's seed is seed + its grid index; rows are returned in grid
    order regardless of how many workers execute them.
    """
    tasks = []
    index = 0
    for n, rho in config.grid:
        for _ in range(config.replications):
            tasks.append(
                (
                    index,
                    n,
                    rho,
                    config.policy,
                    config.horizon_batches,
                    config.seed + index,
                    config.constants,
                    config.batch_len,
                )
            )
            index += 1
    if jobs <= 1:
        return [_sweep_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_task, tasks))


# ---------------------------------------------------------------------------
# CSV persistence (exact round trips: ints stay ints, floats use repr).
# ---------------------------------------------------------------------------

def sweep_records_to_csv(records: list[ExperimentRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in records:
        writer.writerow(
            [
                r.n,
                repr(r.rho),
                r.policy,
                r.seed,
                r.horizon_slots,
                repr(r.mean_total_queue),
                r.max_total_queue,
                r.waste_slots,
                r.idle_slots,
                r.batches_with_positive_U,
                repr(r.mean_B),
            ]
        )
    return buffer.getvalue()


def sweep_records_from_csv(text: str) -> list[ExperimentRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != SWEEP_HEADER:
        raise ValueError(f"unexpected sweep CSV header: {header}")
    out = []
    for row in reader:
        out.append(
            ExperimentRecord(
                n=int(row[0]),
                rho=float(row[1]),
                policy=row[2],
                seed=int(row[3]),
                horizon_slots=int(row[4]),
                mean_total_queue=float(row[5]),
                max_total_queue=int(row[6]),
                waste_slots=int(row[7]),
                idle_slots=int(row[8]),
                batches_with_positive_U=int(row[9]),
                mean_B=float(row[10]),
            )
        )
    return out


def factor_records_to_csv(records: list[FactorRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FACTOR_HEADER)
    for r in records:
        writer.writerow(
            [r.n, r.m, repr(r.p), r.trial, r.seed, r.beta_star, r.beta0, int(r.success)]
        )
    return buffer.getvalue()


def factor_records_from_csv(text: str) -> list[FactorRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != FACTOR_HEADER:
        raise ValueError(f"unexpected factor CSV header: {header}")
    out = []
    for row in reader:
        out.append(
            FactorRecord(
                n=int(row[0]),
                m=int(row[1]),
                p=float(row[2]),
                trial=int(row[3]),
                seed=int(row[4]),
                beta_star=int(row[5]),
                beta0=int(row[6]),
                success=bool(int(row[7])),
            )
        )
    return out


def sweep_config_from_json(text: str) -> SweepConfig:
    data = json.loads(text)
    constants = ADAPTIVE_PRESET
    if data.get("constants"):
        from .params import parse_constants

        with open(data["constants"], encoding="utf-8") as handle:
            constants = parse_constants(handle.read())
    return SweepConfig(
        grid=[(int(n), float(rho)) for n, rho in data["grid"]],
        policy=data["policy"],
        horizon_batches=int(data["horizon_batches"]),
        replications=int(data["replications"]),
        seed=int(data["seed"]),
        constants=constants,
        batch_len=int(data["batch_len"]) if data.get("batch_len") else None,
    )
