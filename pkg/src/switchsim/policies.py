"""Scheduling policies: lower-envelope batching, standard batching,
Max-Weight, and the always-idle null policy.

The lower-envelope policy divides each batch's service period into three
phases.  During the lower envelope phase, subinterval u serves arrivals
from subinterval u-1 using full matchings prescribed by a lower envelope
of their arrival matrix, idling when the envelope is smaller than the
subinterval.  The normal clearing phase runs the optimal clearing schedule
on whatever remains of the batch, truncated to the phase length; leftovers
become backlog.  The backlog clearing phase serves backlogged packets with
a maximal matching over backlog cells each slot.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .factorization import (
    decompose_regular,
    envelope_at,
    largest_envelope,
    optimal_clearing_schedule,
)
from .matrices import QueueMatrix, Schedule
from .params import PolicyParams
from .switch import (
    SwitchState,
    TagFilter,
    serve_any,
    serve_backlog,
    serve_batch,
    serve_class,
)

POLICY_NAMES = ("lower-envelope", "max-weight", "standard-batching")


def max_weight_schedule(Q: np.ndarray) -> Schedule:
    """Feasible schedule maximizing total scheduled queue size.

    Solves the assignment problem on Q and drops cells with zero queue, so
    the all-zero matrix maps to the empty schedule.
    """
    Q = np.asarray(Q)
    if not Q.any():
        return Schedule.empty(Q.shape[0])
    rows, cols = linear_sum_assignment(Q, maximize=True)
    pairs = [(int(i), int(j)) for i, j in zip(rows, cols) if Q[i, j] > 0]
    return Schedule.from_pairs(Q.shape[0], pairs)


def _maximal_matching_on(counts: np.ndarray) -> Schedule:
    """Greedy row-major maximal matching on the support of counts."""
    n = counts.shape[0]
    used_cols = set()
    pairs = []
    for i in range(n):
        for j in range(n):
            if counts[i, j] > 0 and j not in used_cols:
                pairs.append((i, j))
                used_cols.add(j)
                break
    return Schedule.from_pairs(n, pairs)


class LowerEnvelopePolicy:
    """Three-phase batching policy driven by derived PolicyParams."""

    def __init__(self, params: PolicyParams):
        self.params = params
        self.name = "lower-envelope"
        self.batch_length = params.b
        # cumulative ends of I_0..I_ell within a batch, for arrival tagging
        self._tag_bounds = np.cumsum(params.I).tolist()
        # start position (within a service period) of each subinterval u >= 1
        starts = {}
        position = 1
        for u in range(1, params.ell + 1):
            starts[position] = u
            position += params.I[u]
        self._subinterval_starts = starts
        self.reset()

    def reset(self) -> None:
        self._queue: deque = deque()
        self._backlog_at_start: dict[int, int] = {}
        self._records: list[tuple[int, int, int]] = []

    def arrival_tag(self, tau: int) -> tuple[int, Optional[int]]:
        batch = (tau - 1) // self.params.b
        offset = tau - batch * self.params.b
        return batch, bisect_left(self._tag_bounds, offset)

    def _locate(self, tau: int) -> Optional[tuple[int, int]]:
        """Service period index and position (1..b) of slot tau."""
        if tau <= self.params.d:
            return None
        period = (tau - self.params.d - 1) // self.params.b
        return period, tau - period * self.params.b - self.params.d

    def decide(self, state: SwitchState, tau: int):
        located = self._locate(tau)
        if located is None:
            return None
        k, p = located
        params = self.params
        if p == 1:
            self._backlog_at_start[k] = int(state.count_matrix(serve_backlog(k - 1)).sum())
        if p <= params.envelope_phase:
            u = self._subinterval_starts.get(p)
            if u is not None:
                self._fill_envelope_queue(state, k, u)
            return self._queue.popleft() if self._queue else None
        if p <= params.envelope_phase + params.clearing_phase:
            if p == params.envelope_phase + 1:
                self._fill_clearing_queue(state, k)
            return self._queue.popleft() if self._queue else None
        counts = state.count_matrix(serve_backlog(k))
        if not counts.any():
            return None
        return _maximal_matching_on(counts), serve_backlog(k)

    def _fill_envelope_queue(self, state: SwitchState, k: int, u: int) -> None:
        self._queue.clear()
        length = self.params.I[u]
        accept = serve_class(k, u - 1)
        arrivals = QueueMatrix(state.count_matrix(accept))
        envelope = largest_envelope(arrivals)
        use = min(envelope.beta, length)
        if use < envelope.beta:
            envelope = envelope_at(arrivals, use)
        if use >= 1:
            for sigma in decompose_regular(envelope):
                self._queue.append((sigma, accept))
        self._queue.extend([None] * (length - use))

    def _fill_clearing_queue(self, state: SwitchState, k: int) -> None:
        self._queue.clear()
        accept = serve_batch(k)
        remaining = QueueMatrix(state.count_matrix(accept))
        schedules = optimal_clearing_schedule(remaining)
        length = self.params.clearing_phase
        for sigma in schedules[:length]:
            self._queue.append((sigma, accept))
        self._queue.extend([None] * max(0, length - len(schedules)))

    def on_slot_end(self, state: SwitchState, tau: int) -> None:
        located = self._locate(tau)
        if located is None:
            return
        k, p = located
        if p == self.params.envelope_phase + self.params.clearing_phase:
            leftover = int(state.count_matrix(serve_batch(k)).sum())
            self._records.append((k, leftover, self._backlog_at_start.get(k, 0)))

    def batch_records(self) -> list[tuple[int, int, int]]:
        return list(self._records)


class StandardBatchingPolicy:
    """Batch k accumulates untouched and is cleared during batch k+1."""

    def __init__(self, n: int, rho: float, batch_len: int):
        if batch_len < 1:
            raise ValueError("batch_len must be at least 1")
        self.n = n
        self.rho = rho
        self.name = "standard-batching"
        self.batch_length = batch_len
        self.reset()

    def reset(self) -> None:
        self._queue: deque = deque()
        self._backlog_at_start: dict[int, int] = {}
        self._records: list[tuple[int, int, int]] = []

    def arrival_tag(self, tau: int) -> tuple[int, Optional[int]]:
        return (tau - 1) // self.batch_length, None

    def decide(self, state: SwitchState, tau: int):
        b = self.batch_length
        current = (tau - 1) // b
        offset = tau - current * b
        if current == 0:
            return None
        prev = current - 1
        if offset == 1:
            self._backlog_at_start[prev] = int(
                state.count_matrix(serve_backlog(prev - 1)).sum()
            )
            self._queue.clear()
            remaining = QueueMatrix(state.count_matrix(serve_batch(prev)))
            for sigma in optimal_clearing_schedule(remaining)[:b]:
                self._queue.append((sigma, serve_batch(prev)))
        if self._queue:
            return self._queue.popleft()
        counts = state.count_matrix(serve_backlog(prev - 1))
        if not counts.any():
            return None
        return _maximal_matching_on(counts), serve_backlog(prev - 1)

    def on_slot_end(self, state: SwitchState, tau: int) -> None:
        b = self.batch_length
        current = (tau - 1) // b
        if current >= 1 and tau == (current + 1) * b:
            prev = current - 1
            leftover = int(state.count_matrix(serve_batch(prev)).sum())
            self._records.append((prev, leftover, self._backlog_at_start.get(prev, 0)))

    def batch_records(self) -> list[tuple[int, int, int]]:
        return list(self._records)


class MaxWeightPolicy:
    """Serve a maximum-weight matching of the current queue sizes."""

    def __init__(self, n: int):
        self.n = n
        self.name = "max-weight"
        self.batch_length = None

    def reset(self) -> None:
        pass

    def arrival_tag(self, tau: int) -> tuple[int, Optional[int]]:
        return 0, None

    def decide(self, state: SwitchState, tau: int):
        sigma = max_weight_schedule(state.Q)
        if sigma.is_empty():
            return None
        return sigma, serve_any

    def on_slot_end(self, state: SwitchState, tau: int) -> None:
        pass

    def batch_records(self) -> list[tuple[int, int, int]]:
        return []


class NullPolicy:
    """Always idles; useful as a conservation baseline."""

    def __init__(self, n: int):
        self.n = n
        self.name = "null"
        self.batch_length = None

    def reset(self) -> None:
        pass

    def arrival_tag(self, tau: int) -> tuple[int, Optional[int]]:
        return 0, None

    def decide(self, state: SwitchState, tau: int):
        return None

    def on_slot_end(self, state: SwitchState, tau: int) -> None:
        pass

    def batch_records(self) -> list[tuple[int, int, int]]:
        return []
