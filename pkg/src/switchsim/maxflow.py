"""Integral maximum flow on the envelope-testing network.

The network has a source, a sink, n left nodes (rows) and n right nodes
(columns).  Arcs: source->row i with capacity beta, row i->column j with
capacity q_ij, column j->sink with capacity beta.  A beta-lower envelope
of q exists iff the max flow equals beta*n, and the row->column flows of
an integral maximum flow are exactly such an envelope.

Flows are computed with a blocking-flow (Dinic) method; integer capacities
guarantee an integral maximum flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .matrices import QueueMatrix


@dataclass
class FlowNetwork:
    """Directed network with integer capacities on 2n+2 nodes.

    Node layout: 0 = source, 1..n = left (rows), n+1..2n = right (columns),
    2n+1 = sink.
    """

    n: int
    capacity: np.ndarray  # (2n+2, 2n+2) non-negative integers

    def __post_init__(self) -> None:
        size = 2 * self.n + 2
        self.capacity = np.asarray(self.capacity, dtype=np.int64)
        if self.capacity.shape != (size, size):
            raise ValueError(f"capacity matrix must be {size}x{size}")
        if (self.capacity < 0).any():
            raise ValueError("capacities must be non-negative integers")

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return 2 * self.n + 1


def envelope_network(q: QueueMatrix, beta: int) -> FlowNetwork:
    """Build the envelope-testing network for queue matrix q and level beta."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    n = q.n
    size = 2 * n + 2
    cap = np.zeros((size, size), dtype=np.int64)
    cap[0, 1 : n + 1] = beta
    cap[1 : n + 1, n + 1 : 2 * n + 1] = q.q
    cap[n + 1 : 2 * n + 1, size - 1] = beta
    return FlowNetwork(n, cap)


def max_flow(net: FlowNetwork) -> tuple[int, np.ndarray]:
    """Maximum flow value and an integral arc-flow assignment.

    Returns (value, flow) where flow[u, v] is the amount routed on arc
    (u, v); flow is conservative at every non-terminal node and satisfies
    0 <= flow <= capacity arc-wise.
    """
    size = net.capacity.shape[0]
    graph = csr_matrix(net.capacity)
    if graph.nnz == 0:
        return 0, np.zeros((size, size), dtype=np.int64)
    result = maximum_flow(graph, net.source, net.sink)
    signed = result.flow.toarray()
    # the reported flow is antisymmetric; arc flows are its positive part
    # (the network is a DAG, so no opposite-arc pairs exist)
    forward = np.where(signed > 0, signed, 0).astype(np.int64)
    return int(result.flow_value), forward


def envelope_flow(q: QueueMatrix, beta: int) -> tuple[bool, np.ndarray]:
    """Test beta-envelope feasibility and extract the candidate envelope.

    Returns (feasible, g) with g read off the row->column arc flows; g is a
    valid beta-lower envelope of q exactly when feasible is True.
    """
    n = q.n
    net = envelope_network(q, beta)
    value, flow = max_flow(net)
    g = flow[1 : n + 1, n + 1 : 2 * n + 1]
    return value == beta * n, g
