"""Closed-form analytic bounds used by the experiment harness."""

from __future__ import annotations

import math


class UnstableInputError(ValueError):
    """Arrival rate at or above the service rate."""


def kingman_bound(lam: float, m2x: float, mu: float, m2y: float) -> float:
    """Steady upper bound on the expected queue size of a discrete-time
    G/G/1 queue: (m2x + m2y - 2*lam*mu) / (2*(mu - lam)).

    lam and m2x are the mean and second moment of per-slot arrivals, mu and
    m2y of per-slot services.
    """
    if lam >= mu:
        raise UnstableInputError(f"requires lam < mu, got lam={lam}, mu={mu}")
    return (m2x + m2y - 2.0 * lam * mu) / (2.0 * (mu - lam))


def binomial_tail_bounds(mean: float, x: float) -> tuple[float, float]:
    """Exponential bounds on binomial tail probabilities at deviation x.

    Returns (lower, upper): P(X <= E[X] - x) <= lower = exp(-x^2 / (2 mean))
    and P(X >= E[X] + x) <= upper = exp(-x^2 / (2 (mean + x/3))).
    """
    if mean <= 0:
        raise ValueError("mean must be positive")
    if x <= 0:
        raise ValueError("x must be positive")
    lower = math.exp(-(x * x) / (2.0 * mean))
    upper = math.exp(-(x * x) / (2.0 * (mean + x / 3.0)))
    return lower, upper
