"""Exact factorization algorithms on queue matrices.

Envelope feasibility and extraction (via integral max flow), an
exponential-time subset-enumeration oracle for small instances,
decomposition of regular multigraphs into perfect matchings, padding to a
regular matrix, and the optimal clearing schedule that empties any queue
matrix in exactly gamma slots (gamma = largest line sum).
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .matrices import LowerEnvelope, QueueMatrix, Schedule
from .maxflow import envelope_flow

ORACLE_MAX_N = 12
CLEARANCE_ORACLE_MAX_N = 3
CLEARANCE_ORACLE_MAX_ENTRY = 3


class DimensionTooLargeError(ValueError):
    """Instance exceeds the enumeration bounds of an oracle."""


class FactorizationInvariantError(RuntimeError):
    """An internal guarantee was violated (corrupted input)."""


def has_beta_envelope(q: QueueMatrix, beta: int) -> bool:
    """Whether q admits a beta-lower envelope (a spanning beta-regular
    submatrix), decided by max flow on the envelope network."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if beta == 0:
        return True
    feasible, _ = envelope_flow(q, beta)
    return feasible

def envelope_at(q: QueueMatrix, beta: int) -> LowerEnvelope:
    """A beta-lower envelope of q, read off an integral max flow.

    Raises FactorizationInvariantError when no such envelope exists.
    """
    if beta == 0:
        return LowerEnvelope(0, np.zeros_like(q.q))
    feasible, g = envelope_flow(q, beta)
    if not feasible:
        raise FactorizationInvariantError(f"no {beta}-lower envelope exists")
    return LowerEnvelope(beta, g)


def largest_envelope(q: QueueMatrix) -> LowerEnvelope:
    """Lower envelope of q with the largest possible beta.

    Feasibility is monotone in beta, so binary search over
    [0, min(line sums)] is valid; beta = 0 (g = 0) always exists.
    """
    upper = int(min(q.row_sums().min(), q.col_sums().min())) if q.n else 0
    if upper == 0:
        return LowerEnvelope(0, np.zeros_like(q.q))
    best_beta = 0
    best_g = np.zeros_like(q.q)
    lo, hi = 1, upper
    while lo <= hi:
        mid = (lo + hi) // 2
        feasible, g = envelope_flow(q, mid)
        if feasible:
            best_beta, best_g = mid, g
            lo = mid + 1
        else:
            hi = mid - 1
    return LowerEnvelope(best_beta, best_g)


def envelope_oracle(q: QueueMatrix) -> int:
    """Largest feasible beta by direct enumeration of all submatrices.

    Evaluates min over row subsets R and column subsets C with
    |R| + |C| > n of floor(sum(q[R, C]) / (|R| + |C| - n)); restricted to
    n <= 12 (4^n subset pairs).
    """
    n = q.n
    if n > ORACLE_MAX_N:
        raise DimensionTooLargeError(f"oracle enumeration limited to n <= {ORACLE_MAX_N}")
    if n == 0:
        return 0
    masks = np.arange(1 << n, dtype=np.int64)
    members = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)  # (2^n, n)
    sizes = members.sum(axis=1)
    # row-subset column sums, one matmul for all subsets
    subset_cols = members @ q.q  # (2^n, n)
    best = None
    for r_mask in range(1 << n):
        excess = sizes[r_mask] + sizes - n  # |R| + |C| - n for every C
        valid = excess >= 1
        if not valid.any():
            continue
        sums = members[valid] @ subset_cols[r_mask]
        candidates = sums // excess[valid]
        local = int(candidates.min())
        if best is None or local < best:
            best = local
    return int(best)


def decompose_regular(envelope: LowerEnvelope) -> list[Schedule]:
    """Split a beta-regular matrix into exactly beta full matchings.

    A regular bipartite multigraph satisfies Hall's condition, so each
    extraction is guaranteed to find a perfect matching in the remaining
    support; matchings element-wise sum back to the envelope.
    """
    if envelope.beta < 1:
        raise ValueError("decomposition requires beta >= 1")
    n = envelope.n
    residual = envelope.g.copy()
    schedules: list[Schedule] = []
    for _ in range(envelope.beta):
        matched = _perfect_matching(residual)
        if matched is None:
            raise FactorizationInvariantError(
                "support of a regular matrix lost its perfect matching"
            )
        sigma = np.zeros((n, n), dtype=np.int64)
        for i, j in enumerate(matched):
            sigma[i, j] = 1
            residual[i, j] -= 1
        schedules.append(Schedule(sigma))
    if residual.any():
        raise FactorizationInvariantError("decomposition left a non-zero residual")
    return schedules


def _perfect_matching(mult: np.ndarray) -> list[int] | None:
    """Perfect matching on the support of mult via augmenting paths.

    Rows are processed in order and neighbours tried in ascending column
    order, so the result is deterministic.  Returns row -> column, or None.
    """
    n = mult.shape[0]
    rows = mult.tolist()
    adjacency = [[j for j, v in enumerate(row) if v > 0] for row in rows]
    col_owner = [-1] * n

    def augment(row: int, seen: list[bool]) -> bool:
        for col in adjacency[row]:
            if seen[col]:
                continue
            seen[col] = True
            if col_owner[col] < 0 or augment(col_owner[col], seen):
                col_owner[col] = row
                return True
        return False

    for row in range(n):
        if not augment(row, [False] * n):
            return None
    row_match = [-1] * n
    for col, row in enumerate(col_owner):
        row_match[row] = col
    return row_match


def pad_to_regular(q: QueueMatrix) -> QueueMatrix:
    """Smallest-gamma regular completion: h >= q with all line sums gamma(q).

    Fills deficiencies greedily in row-major order; a fillable cell always
    exists while any deficiency remains because total row deficiency equals
    total column deficiency.
    """
    gamma = q.gamma()
    h = q.q.copy()
    row_need = gamma - q.row_sums()
    col_need = gamma - q.col_sums()
    i = j = 0
    n = q.n
    while i < n and j < n:
        if row_need[i] == 0:
            i += 1
        elif col_need[j] == 0:
            j += 1
        else:
            add = int(min(row_need[i], col_need[j]))
            h[i, j] += add
            row_need[i] -= add
            col_need[j] -= add
    return QueueMatrix(h)


def optimal_clearing_schedule(q: QueueMatrix) -> list[Schedule]:
    """Sequence of exactly gamma(q) feasible schedules that clears q.

    Pads q to a gamma-regular matrix, decomposes it into gamma full
    matchings, and in emission order marks a matched cell as a real service
    only while unconsumed packets of q remain there; padding copies become
    idle cells of that slot's schedule.
    """
    gamma = q.gamma()
    if gamma == 0:
        return []
    padded = pad_to_regular(q)
    matchings = decompose_regular(LowerEnvelope(gamma, padded.q))
    consumed = np.zeros_like(q.q)
    out: list[Schedule] = []
    for matching in matchings:
        real = []
        for i, j in matching.pairs():
            if consumed[i, j] < q.q[i, j]:
                consumed[i, j] += 1
                real.append((i, j))
        out.append(Schedule.from_pairs(q.n, real))
    if not np.array_equal(consumed, q.q):
        raise FactorizationInvariantError("clearing schedule failed to consume q")
    return out


def min_clearance_oracle(q: QueueMatrix) -> int:
    """Exact minimum number of feasible schedules that clear q, by
    breadth-first search over residual matrices.

    Restricted to n <= 3 with entries <= 3.  Searching only over maximal
    matchings of the current support is lossless: enlarging a slot's
    matching never delays later slots.
    """
    n = q.n
    if n > CLEARANCE_ORACLE_MAX_N or (q.q > CLEARANCE_ORACLE_MAX_ENTRY).any():
        raise DimensionTooLargeError(
            "clearance oracle limited to n <= 3 with entries <= 3"
        )
    start = tuple(int(v) for v in q.q.ravel())
    if not any(start):
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, depth = frontier.popleft()
        grid = np.array(state, dtype=np.int64).reshape(n, n)
        for matching in _maximal_matchings(grid > 0):
            nxt = grid.copy()
            for i, j in matching:
                nxt[i, j] -= 1
            key = tuple(int(v) for v in nxt.ravel())
            if not any(key):
                return depth + 1
            if key not in seen:
                seen.add(key)
                frontier.append((key, depth + 1))
    raise FactorizationInvariantError("clearance search exhausted without clearing")


def _maximal_matchings(support: np.ndarray) -> list[list[tuple[int, int]]]:
    """All maximal matchings of a 0/1 support matrix (n tiny)."""
    n = support.shape[0]
    results: list[list[tuple[int, int]]] = []

    def extend(row: int, used_cols: int, chosen: list[tuple[int, int]]) -> None:
        if row == n:
            for i, j in np.argwhere(support).tolist():
                if not (used_cols >> j) & 1 and all(ci != i for ci, _ in chosen):
                    return  # extendable, not maximal
            results.append(list(chosen))
            return
        extend(row + 1, used_cols, chosen)  # leave this row unmatched
        for col in range(n):
            if support[row, col] and not (used_cols >> col) & 1:
                chosen.append((row, col))
                extend(row + 1, used_cols | (1 << col), chosen)
                chosen.pop()

    extend(0, 0, [])
    return results
