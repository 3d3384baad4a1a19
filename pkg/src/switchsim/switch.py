"""Discrete-time switch model: arrivals, queue state, service, metrics.

Timing convention per slot tau: the policy observes the state and picks a
schedule, the schedule is applied mid-slot, and new arrivals land at the
end of the slot (serveable from tau+1 on).  Cumulative counters satisfy
Q(tau+1) = A(tau) - S(tau) cell-wise at every slot, where S counts actual
services; offered services finding an empty cell are recorded as wasted.

Packets are tagged with their (batch, subinterval) of arrival so batching
policies can serve selected arrival groups only.  Within a cell, packets
of one tag class live in a FIFO deque of arrival slots, and tag classes
are stored in arrival order, so serving the oldest packet matching a
filter means scanning the classes in insertion order.  Tag filters must
therefore be constant on packets sharing a (batch, subinterval) class;
every policy in this package satisfies that.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Protocol

import numpy as np
from numpy.random import Generator, Philox

from .matrices import Schedule


class PacketTag(NamedTuple):
    batch: int
    subinterval: Optional[int]
    arrival_slot: int


# Predicate deciding which packets a slot's service may touch.
TagFilter = Callable[[PacketTag], bool]


def serve_any(tag: PacketTag) -> bool:
    return True


def serve_class(batch: int, subinterval: Optional[int]) -> TagFilter:
    """Only packets that arrived in one (batch, subinterval) group."""

    def accept(tag: PacketTag) -> bool:
        return tag.batch == batch and tag.subinterval == subinterval

    return accept


def serve_batch(batch: int) -> TagFilter:
    """Only packets of the given batch, any subinterval."""

    def accept(tag: PacketTag) -> bool:
        return tag.batch == batch

    return accept


def serve_backlog(current_batch: int) -> TagFilter:
    """Packets of the current batch and all earlier ones."""

    def accept(tag: PacketTag) -> bool:
        return tag.batch <= current_batch

    return accept


class ArrivalStream:
    """Counter-based Bernoulli arrival source.

    The generator is keyed by (seed, replication) and uses the slot number
    as the block counter, so the matrix of any slot is reproducible
    independent of scheduling decisions and of execution order.
    """

    def __init__(self, seed: int, replication: int, n: int, rho: float):
        if not 0.0 < rho < 1.0:
            raise ValueError("rho must lie strictly between 0 and 1")
        if n < 1:
            raise ValueError("n must be positive")
        self.seed = seed
        self.replication = replication
        self.n = n
        self.rho = rho
        self.slot = 1
        self._key = ((seed & (2**64 - 1)) << 64) | (replication & (2**64 - 1))

    def matrix_for_slot(self, slot: int) -> np.ndarray:
        gen = Generator(Philox(key=self._key, counter=slot << 64))
        uniforms = gen.random((self.n, self.n))
        return (uniforms < self.rho / self.n).astype(np.int64)


def generate_arrivals(stream: ArrivalStream, n: int, rho: float) -> np.ndarray:
    """One slot of Bernoulli(rho/n) arrivals; advances the stream."""
    if n != stream.n or rho != stream.rho:
        raise ValueError("stream was built for different (n, rho)")
    matrix = stream.matrix_for_slot(stream.slot)
    stream.slot += 1
    return matrix


@dataclass
class SwitchState:
    """Full queue state of an n x n switch plus cumulative counters."""

    n: int
    tau: int = 1
    Q: np.ndarray = None
    A: np.ndarray = None
    S: np.ndarray = None
    offered: np.ndarray = None
    cells: list = None  # flat list of per-cell {(batch, sub): deque[arrival_slot]}

    def __post_init__(self) -> None:
        shape = (self.n, self.n)
        if self.Q is None:
            self.Q = np.zeros(shape, dtype=np.int64)
        if self.A is None:
            self.A = np.zeros(shape, dtype=np.int64)
        if self.S is None:
            self.S = np.zeros(shape, dtype=np.int64)
        if self.offered is None:
            self.offered = np.zeros(shape, dtype=np.int64)
        if self.cells is None:
            self.cells = [dict() for _ in range(self.n * self.n)]

    def cell(self, i: int, j: int) -> dict:
        return self.cells[i * self.n + j]

    def total_queue(self) -> int:
        return int(self.Q.sum())

    def wasted(self) -> np.ndarray:
        """Cumulative wasted offered services, cell-wise."""
        return self.offered - self.S

    def count_matrix(self, accept: TagFilter) -> np.ndarray:
        """Per-cell counts of packets whose tag class matches the filter."""
        counts = np.zeros((self.n, self.n), dtype=np.int64)
        for idx, classes in enumerate(self.cells):
            if not classes:
                continue
            i, j = divmod(idx, self.n)
            total = 0
            for (batch, sub), queue in classes.items():
                if queue and accept(PacketTag(batch, sub, queue[0])):
                    total += len(queue)
            counts[i, j] = total
        return counts

    def check_conservation(self) -> None:
        if not np.array_equal(self.Q, self.A - self.S):
            raise AssertionError("conservation Q = A - S violated")
        for idx, classes in enumerate(self.cells):
            stored = sum(len(qu) for qu in classes.values())
            if stored != self.Q.ravel()[idx]:
                raise AssertionError("per-cell FIFO length diverged from Q")


def apply_schedule(state: SwitchState, sigma: Schedule, accept: TagFilter) -> int:
    """Serve one slot: for each scheduled cell, serve the oldest packet
    matching the filter, or record a wasted offered service.

    Returns the number of packets actually served.
    """
    if sigma.n != state.n:
        raise ValueError("schedule dimension does not match state")
    served = 0
    for i, j in sigma.pairs():
        state.offered[i, j] += 1
        classes = state.cell(i, j)
        hit = None
        for key, queue in classes.items():
            if queue and accept(PacketTag(key[0], key[1], queue[0])):
                hit = key
                break
        if hit is None:
            continue
        classes[hit].popleft()
        if not classes[hit]:
            del classes[hit]
        state.S[i, j] += 1
        state.Q[i, j] -= 1
        served += 1
    return served


def inject_arrivals(
    state: SwitchState,
    arrivals: np.ndarray,
    batch: int,
    subinterval: Optional[int],
) -> None:
    """Append one slot's tagged arrivals; they become serveable next slot."""
    if arrivals.shape != (state.n, state.n):
        raise ValueError("arrival matrix dimension does not match state")
    key = (batch, subinterval)
    slot = state.tau
    for i, j in np.argwhere(arrivals > 0).tolist():
        classes = state.cell(i, j)
        if key not in classes:
            classes[key] = deque()
        classes[key].extend([slot] * int(arrivals[i, j]))
    state.A += arrivals
    state.Q += arrivals


class Policy(Protocol):
    """Per-run scheduling policy driven slot by slot by `run`."""

    name: str
    batch_length: Optional[int]

    def reset(self) -> None: ...

    def arrival_tag(self, tau: int) -> tuple[int, Optional[int]]: ...

    def decide(self, state: SwitchState, tau: int) -> Optional[tuple[Schedule, TagFilter]]: ...

    def on_slot_end(self, state: SwitchState, tau: int) -> None: ...

    def batch_records(self) -> list[tuple[int, int, int]]:
        """(batch, U_k, B_k) rows for completed service periods."""
        ...


@dataclass
class BatchRow:
    batch: int
    U: int
    B: int
    max_row_sum: int
    max_col_sum: int


@dataclass
class MetricsTrace:
    """Per-slot and per-batch outputs of one simulated run."""

    n: int
    rho: float
    seed: int
    policy: str
    horizon: int
    total_queue: list[int] = field(default_factory=list)  # end-of-slot totals
    wasted: list[int] = field(default_factory=list)  # cumulative
    idle: list[int] = field(default_factory=list)  # cumulative idle slots
    batches: list[BatchRow] = field(default_factory=list)

    def waste_slots(self) -> int:
        """Number of slots in which at least one offered service was wasted."""
        count = 0
        prev = 0
        for value in self.wasted:
            if value > prev:
                count += 1
            prev = value
        return count

    def to_slot_csv(self) -> str:
        lines = ["slot,total_queue,wasted,idle"]
        for idx, total in enumerate(self.total_queue):
            lines.append(f"{idx + 1},{total},{self.wasted[idx]},{self.idle[idx]}")
        return "\n".join(lines) + "\n"

    def to_batch_csv(self) -> str:
        lines = ["batch,U_k,B_k,max_row_sum,max_col_sum"]
        for row in self.batches:
            lines.append(
                f"{row.batch},{row.U},{row.B},{row.max_row_sum},{row.max_col_sum}"
            )
        return "\n".join(lines) + "\n"


def run(
    policy,
    n: int,
    rho: float,
    horizon: int,
    seed: int,
    *,
    replication: int = 0,
    check_conservation: bool = False,
    arrival_source: Optional[Callable[[int], np.ndarray]] = None,
) -> MetricsTrace:
    """Simulate `horizon` slots and return the metrics trace.

    arrival_source overrides the Bernoulli stream with a slot -> matrix
    callable (used by deterministic fixtures).
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    state = SwitchState(n)
    policy.reset()
    if arrival_source is None:
        stream = ArrivalStream(seed, replication, n, rho)
        draw = lambda tau: generate_arrivals(stream, n, rho)
    else:
        draw = arrival_source
    trace = MetricsTrace(n=n, rho=rho, seed=seed, policy=policy.name, horizon=horizon)
    idle_slots = 0
    wasted_total = 0
    batch_row_sums: dict[int, np.ndarray] = {}
    batch_col_sums: dict[int, np.ndarray] = {}
    for tau in range(1, horizon + 1):
        state.tau = tau
        decision = policy.decide(state, tau)
        if decision is None:
            idle_slots += 1
        else:
            sigma, accept = decision
            if sigma.is_empty():
                idle_slots += 1
            served = apply_schedule(state, sigma, accept)
            wasted_total += sigma.size() - served
        batch, subinterval = policy.arrival_tag(tau)
        arrivals = draw(tau)
        inject_arrivals(state, arrivals, batch, subinterval)
        if policy.batch_length is not None:
            if batch not in batch_row_sums:
                batch_row_sums[batch] = np.zeros(n, dtype=np.int64)
                batch_col_sums[batch] = np.zeros(n, dtype=np.int64)
            batch_row_sums[batch] += arrivals.sum(axis=1)
            batch_col_sums[batch] += arrivals.sum(axis=0)
        policy.on_slot_end(state, tau)
        if check_conservation:
            state.check_conservation()
        trace.total_queue.append(state.total_queue())
        trace.wasted.append(wasted_total)
        trace.idle.append(idle_slots)
    if wasted_total != int((state.offered - state.S).sum()):
        raise AssertionError("waste accounting diverged from offered - actual")
    for batch, leftover, backlog in policy.batch_records():
        rows = batch_row_sums.get(batch)
        cols = batch_col_sums.get(batch)
        trace.batches.append(
            BatchRow(
                batch=batch,
                U=leftover,
                B=backlog,
                max_row_sum=int(rows.max()) if rows is not None else 0,
                max_col_sum=int(cols.max()) if cols is not None else 0,
            )
        )
    return trace
