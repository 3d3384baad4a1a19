"""Core matrix types: queue matrices, schedules, lower envelopes.

A queue matrix is an n x n grid of non-negative integers; entry (i, j) is
both the number of packets waiting at input i for output j and the edge
multiplicity between left vertex i and right vertex j of a bipartite
multigraph.  A schedule is a partial permutation matrix (a matching).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_int_matrix(data) -> np.ndarray:
    arr = np.asarray(data)
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise ValueError("matrix entries must be integers")
        arr = rounded
    return arr.astype(np.int64)


@dataclass
class QueueMatrix:
    """Square non-negative integer matrix of per-cell packet counts."""

    q: np.ndarray

    def __post_init__(self) -> None:
        self.q = _as_int_matrix(self.q)
        if self.q.ndim != 2 or self.q.shape[0] != self.q.shape[1]:
            raise ValueError(f"queue matrix must be square, got shape {self.q.shape}")
        if (self.q < 0).any():
            raise ValueError("queue matrix entries must be non-negative")

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def row_sums(self) -> np.ndarray:
        return self.q.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.q.sum(axis=0)

    def gamma(self) -> int:
        """Largest line sum: the minimum clearance time of this matrix."""
        if self.n == 0:
            return 0
        return int(max(self.row_sums().max(), self.col_sums().max()))

    def total(self) -> int:
        return int(self.q.sum())

    def copy(self) -> "QueueMatrix":
        return QueueMatrix(self.q.copy())

    def __eq__(self, other) -> bool:
        return isinstance(other, QueueMatrix) and np.array_equal(self.q, other.q)


@dataclass
class Schedule:
    """0/1 matrix with every row and column sum at most 1 (a matching)."""

    sigma: np.ndarray

    def __post_init__(self) -> None:
        self.sigma = _as_int_matrix(self.sigma)
        if self.sigma.ndim != 2 or self.sigma.shape[0] != self.sigma.shape[1]:
            raise ValueError(f"schedule must be square, got shape {self.sigma.shape}")
        if ((self.sigma != 0) & (self.sigma != 1)).any():
            raise ValueError("schedule entries must be 0 or 1")
        if (self.sigma.sum(axis=1) > 1).any() or (self.sigma.sum(axis=0) > 1).any():
            raise ValueError("schedule must have row and column sums at most 1")

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "Schedule":
        sigma = np.zeros((n, n), dtype=np.int64)
        for i, j in pairs:
            sigma[i, j] = 1
        return cls(sigma)

    @classmethod
    def empty(cls, n: int) -> "Schedule":
        return cls(np.zeros((n, n), dtype=np.int64))

    def pairs(self) -> list[tuple[int, int]]:
        """Scheduled cells as (input, output) pairs in row-major order."""
        rows, cols = np.nonzero(self.sigma)
        return list(zip(rows.tolist(), cols.tolist()))

    def size(self) -> int:
        return int(self.sigma.sum())

    def is_empty(self) -> bool:
        return not self.sigma.any()

    def is_full_matching(self) -> bool:
        return bool(
            (self.sigma.sum(axis=1) == 1).all() and (self.sigma.sum(axis=0) == 1).all()
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Schedule) and np.array_equal(self.sigma, other.sigma)


@dataclass
class LowerEnvelope:
    """A beta-regular integer sub-matrix: all 2n line sums equal beta.

    Constructed against some source queue matrix q with 0 <= g <= q; the
    g <= q relation is checked by the producer, not stored here.
    """

    beta: int
    g: np.ndarray

    def __post_init__(self) -> None:
        self.g = _as_int_matrix(self.g)
        self.beta = int(self.beta)
        if self.g.ndim != 2 or self.g.shape[0] != self.g.shape[1]:
            raise ValueError(f"envelope must be square, got shape {self.g.shape}")
        if (self.g < 0).any():
            raise ValueError("envelope entries must be non-negative")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if (self.g.sum(axis=1) != self.beta).any() or (self.g.sum(axis=0) != self.beta).any():
            raise ValueError("all row and column sums of an envelope must equal beta")

    @property
    def n(self) -> int:
        return self.g.shape[0]


# A MatchingSequence is an ordered list of Schedule values; produced by the
# regular-decomposition and clearing routines.
MatchingSequence = list


# ---------------------------------------------------------------------------
# Text formats.  Matrix files: first line n, then n lines of n integers.
# Matching sequences: one line per slot listing "i:j" pairs, 1-based.
# ---------------------------------------------------------------------------

def format_matrix(q: QueueMatrix) -> str:
    lines = [str(q.n)]
    for i in range(q.n):
        lines.append(" ".join(str(int(v)) for v in q.q[i]))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> QueueMatrix:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty matrix file")
    n = int(tokens[0])
    if n < 0:
        raise ValueError("matrix dimension must be non-negative")
    values = tokens[1:]
    if len(values) != n * n:
        raise ValueError(f"expected {n * n} entries for n={n}, got {len(values)}")
    grid = np.array([int(v) for v in values], dtype=np.int64).reshape(n, n)
    return QueueMatrix(grid)


def format_matching_sequence(schedules: list[Schedule]) -> str:
    lines = []
    for sch in schedules:
        lines.append(" ".join(f"{i + 1}:{j + 1}" for i, j in sch.pairs()))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_matching_sequence(text: str, n: int) -> list[Schedule]:
    schedules = []
    for line in text.splitlines():
        pairs = []
        for token in line.split():
            left, right = token.split(":")
            pairs.append((int(left) - 1, int(right) - 1))
        schedules.append(Schedule.from_pairs(n, pairs))
    return schedules
