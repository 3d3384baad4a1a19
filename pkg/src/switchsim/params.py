"""Batching-policy parameter derivation and validity checking.

Given the system scale n, the load rho and a set of policy constants, this
module derives the batch length b, the accumulation delay d, the clearing
budget s and the subinterval lengths I_0..I_ell of the lower envelope
phase.  A parameter set is valid when all three phase lengths are positive
(b - d, d + s - b, b - s >= 1) and the subinterval construction for the
chosen mode succeeds; otherwise derivation raises InvalidRegimeError
naming the violated condition.

Two subinterval modes exist.  Theoretical mode uses the linear recursion
I_u = d - 19*u*sqrt(d log f), whose constants only admit astronomically
large batches (b >~ 1e9 slots); adaptive mode uses the geometric recursion
I_u = rho*I_{u-1} - sqrt(c_f rho I_{u-1} log f), which tracks the realized
envelope sizes at desk scale.  All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

THEORETICAL = "theoretical"
ADAPTIVE = "adaptive"


class InvalidRegimeError(ValueError):
    """Parameters fall outside the regime where the policy is well-defined."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = f"invalid regime: {condition}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class InfeasibleSubintervalsError(ValueError):
    """No subinterval count satisfies the closing condition."""


@dataclass(frozen=True)
class PolicyConstants:
    """Constants c_b, c_d, c_s of the batching policy plus the mode switch.

    In theoretical mode the full constant conditions are enforced
    (c_b - sqrt(c_s c_b) >= 1, c_d^{3/2} >= 76 c_b, c_d >= c_b, c_s >= 30);
    adaptive mode only requires c_b - sqrt(c_s c_b) >= 1.  c_f is the slack
    constant of the adaptive subinterval recursion.
    """

    c_b: float
    c_d: float
    c_s: float
    mode: str = ADAPTIVE
    c_f: float = 304.0

    def __post_init__(self) -> None:
        if self.mode not in (THEORETICAL, ADAPTIVE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if min(self.c_b, self.c_d, self.c_s) <= 0 or self.c_f <= 0:
            raise ValueError("constants must be positive")
        if self.c_b - math.sqrt(self.c_s * self.c_b) < 1:
            raise ValueError("constants must satisfy c_b - sqrt(c_s*c_b) >= 1")
        if self.mode == THEORETICAL:
            if self.c_d ** 1.5 < 76 * self.c_b:
                raise ValueError("theoretical mode requires c_d^(3/2) >= 76*c_b")
            if self.c_d < self.c_b:
                raise ValueError("theoretical mode requires c_d >= c_b")
            if self.c_s < 30:
                raise ValueError("theoretical mode requires c_s >= 30")


# Smallest integer constants satisfying the theoretical-mode conditions.
THEORETICAL_PRESET = PolicyConstants(c_b=32.0, c_d=181.0, c_s=30.0, mode=THEORETICAL)

# Desk-scale defaults: validated empirically so that an n=16, rho=0.85 run
# clears every batch within its service period (see tests).
ADAPTIVE_PRESET = PolicyConstants(c_b=8.0, c_d=12.0, c_s=4.0, mode=ADAPTIVE, c_f=5.0)


@dataclass(frozen=True)
class PolicyParams:
    """Derived batching parameters for one (n, rho) operating point."""

    n: int
    rho: float
    f: float
    b: int
    d: int
    s: int
    ell: int
    I: tuple[int, ...]  # subinterval lengths I_0..I_ell, summing to b
    c_r: float
    c_o: float
    mode: str = ADAPTIVE

    @property
    def envelope_phase(self) -> int:
        return self.b - self.d

    @property
    def clearing_phase(self) -> int:
        return self.d + self.s - self.b

    @property
    def backlog_phase(self) -> int:
        return self.b - self.s


def scale_parameter(n: int, rho: float) -> float:
    """f = max(n, 1/(1-rho)), the scale governing all logarithmic factors."""
    return max(float(n), 1.0 / (1.0 - rho))


def derive_params(n: int, rho: float, constants: PolicyConstants) -> PolicyParams:
    """Derive (b, d, s, subintervals) and check regime validity.

    Raises InvalidRegimeError when any phase length drops below one slot or
    the subinterval construction fails; raises ValueError for out-of-range
    n or rho.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    f = scale_parameter(n, rho)
    log_f = math.log(f)
    gap = 1.0 - rho
    b = math.ceil(constants.c_b * gap ** -2.0 * log_f)
    d = math.ceil(constants.c_d * gap ** (-4.0 / 3.0) * log_f)
    s = math.ceil(rho * b + math.sqrt(constants.c_s * b * log_f))
    if b - d < 1:
        raise InvalidRegimeError("b - d >= 1", f"b={b}, d={d}")
    if b - s < 1:
        raise InvalidRegimeError("b - s >= 1", f"b={b}, s={s}")
    if d + s - b < 1:
        raise InvalidRegimeError("d + s - b >= 1", f"b={b}, d={d}, s={s}")
    if constants.mode == THEORETICAL:
        try:
            ell, intervals = subintervals_theoretical(b, d, f)
        except InfeasibleSubintervalsError as exc:
            raise InvalidRegimeError("subintervals feasible", str(exc)) from exc
    else:
        ell, intervals = subintervals_adaptive(b, d, rho, f, constants.c_f)
    c_r = constants.c_b - math.sqrt(constants.c_s * constants.c_b)
    return PolicyParams(
        n=n,
        rho=rho,
        f=f,
        b=b,
        d=d,
        s=s,
        ell=ell,
        I=tuple(intervals),
        c_r=c_r,
        c_o=constants.c_d - c_r,
        mode=constants.mode,
    )


def subintervals_theoretical(b: int, d: int, f: float) -> tuple[int, list[int]]:
    """Subinterval lengths I_u = floor(d - 19u sqrt(d log f)) with the final
    one absorbing the remainder of b.

    ell is the unique index whose remainder satisfies
    0 <= I_ell <= d - 19*ell*sqrt(d log f); raises
    InfeasibleSubintervalsError when no index does.
    """
    log_f = math.log(f)
    step = 19.0 * math.sqrt(d * log_f)
    intervals = [d]
    total = d
    u = 1
    while True:
        cap = d - step * u
        remainder = b - total
        if remainder < 0:
            raise InfeasibleSubintervalsError(
                f"accumulated subintervals overshoot b={b} at u={u}"
            )
        if remainder <= cap:
            intervals.append(remainder)
            return u, intervals
        nxt = math.floor(cap)
        if nxt <= 0:
            raise InfeasibleSubintervalsError(
                f"subinterval recursion exhausted below b={b} at u={u}"
            )
        intervals.append(nxt)
        total += nxt
        u += 1


def subintervals_adaptive(
    b: int, d: int, rho: float, f: float, c_f: float
) -> tuple[int, list[int]]:
    """Geometric subinterval recursion for desk-scale runs.

    I_0 = d and I_u = max(1, floor(rho*I_{u-1} - sqrt(c_f rho I_{u-1} log f)))
    until the lengths sum to at least b; the final one is truncated so the
    total equals b exactly.
    """
    if not b > d >= 1:
        raise ValueError("requires b > d >= 1")
    log_f = math.log(f)
    intervals = [d]
    total = d
    prev = d
    while total < b:
        raw = rho * prev - math.sqrt(c_f * rho * prev * log_f)
        nxt = max(1, math.floor(raw))
        if total + nxt >= b:
            nxt = b - total
        intervals.append(nxt)
        total += nxt
        prev = nxt
    return len(intervals) - 1, intervals


def backlog_update(backlog: int, leftover: int, b: int, s: int) -> int:
    """One step of the backlog recursion: (B + U - (b - s))^+."""
    if backlog < 0 or leftover < 0 or s < 0:
        raise ValueError("inputs must be non-negative")
    if b <= s:
        raise ValueError("requires b > s")
    return max(backlog + leftover - (b - s), 0)


# ---------------------------------------------------------------------------
# Constants files: line-oriented "key = value" pairs.
# ---------------------------------------------------------------------------

def parse_constants(text: str) -> PolicyConstants:
    """Parse a constants file with keys c_b, c_d, c_s, c_f and mode."""
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed constants line: {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    unknown = set(values) - {"c_b", "c_d", "c_s", "c_f", "mode"}
    if unknown:
        raise ValueError(f"unknown constants keys: {sorted(unknown)}")
    mode = values.get("mode", ADAPTIVE)
    base = THEORETICAL_PRESET if mode == THEORETICAL else ADAPTIVE_PRESET
    kwargs = {"mode": mode}
    for key in ("c_b", "c_d", "c_s", "c_f"):
        if key in values:
            kwargs[key] = float(values[key])
    return replace(base, **kwargs)


def format_constants(constants: PolicyConstants) -> str:
    return (
        f"c_b = {constants.c_b}\n"
        f"c_d = {constants.c_d}\n"
        f"c_s = {constants.c_s}\n"
        f"c_f = {constants.c_f}\n"
        f"mode = {constants.mode}\n"
    )
