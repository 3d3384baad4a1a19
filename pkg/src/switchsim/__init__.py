"""Input-queued switch simulator, lower-envelope batching policies, and
bipartite multigraph factorization algorithms."""

from .bounds import binomial_tail_bounds, kingman_bound
from .factorization import (
    decompose_regular,
    envelope_at,
    envelope_oracle,
    has_beta_envelope,
    largest_envelope,
    min_clearance_oracle,
    optimal_clearing_schedule,
    pad_to_regular,
)
from .matrices import LowerEnvelope, QueueMatrix, Schedule
from .maxflow import FlowNetwork, envelope_network, max_flow
from .params import (
    ADAPTIVE_PRESET,
    THEORETICAL_PRESET,
    InvalidRegimeError,
    PolicyConstants,
    PolicyParams,
    backlog_update,
    derive_params,
    subintervals_adaptive,
    subintervals_theoretical,
)
from .policies import (
    LowerEnvelopePolicy,
    MaxWeightPolicy,
    NullPolicy,
    StandardBatchingPolicy,
    max_weight_schedule,
)
from .switch import (
    ArrivalStream,
    MetricsTrace,
    SwitchState,
    apply_schedule,
    generate_arrivals,
    inject_arrivals,
    run,
)

__all__ = [
    "ADAPTIVE_PRESET",
    "ArrivalStream",
    "FlowNetwork",
    "InvalidRegimeError",
    "LowerEnvelope",
    "LowerEnvelopePolicy",
    "MaxWeightPolicy",
    "MetricsTrace",
    "NullPolicy",
    "PolicyConstants",
    "PolicyParams",
    "QueueMatrix",
    "Schedule",
    "StandardBatchingPolicy",
    "SwitchState",
    "THEORETICAL_PRESET",
    "apply_schedule",
    "backlog_update",
    "binomial_tail_bounds",
    "decompose_regular",
    "derive_params",
    "envelope_at",
    "envelope_network",
    "envelope_oracle",
    "generate_arrivals",
    "has_beta_envelope",
    "inject_arrivals",
    "kingman_bound",
    "largest_envelope",
    "max_flow",
    "max_weight_schedule",
    "min_clearance_oracle",
    "optimal_clearing_schedule",
    "pad_to_regular",
    "run",
    "subintervals_adaptive",
    "subintervals_theoretical",
]
