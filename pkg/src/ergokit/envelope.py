"""Column min/max envelopes under matrix powering, as executable certificates.

For a positive stochastic matrix the per-column minimum m^(i) rises, the
maximum M^(i) falls, and the gap Delta^(i) contracts by at least
(1 - p_min) per step (and by (1 - 2 p_min) when that factor is positive).
This module tracks those envelopes, verifies the contraction inequalities
on actual traces, squeezes the stationary distribution out of the
collapsing interval, and turns the contraction rate into a mixing-time
bound that can be compared with the empirically scanned mixing time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import Distribution, StochasticMatrix, _tv_rows, power, stationary_residual
from .errors import (
    MaxIterExceededError,
    MonotonicityViolationError,
    NotErgodicError,
    NotPositiveError,
)
from .stationary import StationaryResult, stationary_linear
from .structure import analyze, primitivity_exponent

#: Slack for the "should be impossible" monotonicity assertions; a few ulps
#: of accumulated matmul rounding, nothing more.
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class EnvelopeRecord:
    i: int
    m: float
    M: float
    delta: float


@dataclass(frozen=True)
class EnvelopeTrace:
    column: int
    iterations: tuple[EnvelopeRecord, ...]
    p_min: float
    contraction_factor: float  # 1 - p_min

    @property
    def converged_delta(self) -> float:
        return self.iterations[-1].delta


@dataclass(frozen=True)
class ContractionVerdict:
    """Per-inequality outcome of checking a trace; slack is the worst
    (most negative) margin observed, so passing means slack >= -tolerance."""

    min_entry_ok: bool
    max_entry_ok: bool
    two_pmin_ok: bool | None  # None when the (1 - 2 p_min) factor is <= 0
    dahiya_ok: bool
    worst_slack: float

    @property
    def all_ok(self) -> bool:
        return (
            self.min_entry_ok
            and self.max_entry_ok
            and self.dahiya_ok
            and (self.two_pmin_ok is not False)
        )


@dataclass(frozen=True)
class MixingEstimate:
    epsilon: float
    empirical_tmix: int
    bound_tmix: int
    primitivity_m: int
    pmin_of_Pm: float


def envelope_iterate(
    P: StochasticMatrix, column: int, max_iter: int = 10_000, tol: float = 1e-12
) -> EnvelopeTrace:
    """Track (m^(i), M^(i), Delta^(i)) for one column of P^i, i = 1, 2, ...

    Stops at the first i with Delta^(i) <= tol, or at max_iter. The matrix
    must be entrywise positive; lift a merely ergodic chain to P^m first.
    """
    if (P.entries <= 0.0).any():
        raise NotPositiveError("envelope iteration needs an entrywise positive matrix")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    p_min = P.min_entry()
    S = P.entries
    records = []
    prev_m, prev_M = -np.inf, np.inf
    for i in range(1, max_iter + 1):
        col = S[:, column]
        m, M = float(col.min()), float(col.max())
        if m < prev_m - _MONOTONE_SLACK or M > prev_M + _MONOTONE_SLACK:
            raise MonotonicityViolationError(
                f"envelope lost monotonicity at i={i}: "
                f"m {prev_m!r}->{m!r}, M {prev_M!r}->{M!r}"
            )
        records.append(EnvelopeRecord(i=i, m=m, M=M, delta=M - m))
        if M - m <= tol:
            break
        prev_m, prev_M = m, M
        S = S @ P.entries
    return EnvelopeTrace(
        column=column,
        iterations=tuple(records),
        p_min=p_min,
        contraction_factor=1.0 - p_min,
    )


def verify_contraction(trace: EnvelopeTrace, tol: float = 1e-12) -> ContractionVerdict:
    """Check every consecutive pair of a trace against the four contraction
    inequalities. The (1 - 2 p_min) factor is only meaningful when positive
    (guaranteed for three or more states); otherwise that check is skipped.
    """
    p = trace.p_min
    two_factor = 1.0 - 2.0 * p
    min_ok = max_ok = dahiya_ok = True
    two_ok: bool | None = True if two_factor > 0 else None
    worst = math.inf
    for a, b in zip(trace.iterations, trace.iterations[1:]):
        slacks = [
            b.m - (a.m + p * (a.M - a.m)),        # lower envelope must rise enough
            (a.M - p * (a.M - a.m)) - b.M,        # upper envelope must fall enough
            (1.0 - p) * a.delta - b.delta,        # single-inequality gap bound
        ]
        if b.m < a.m + p * (a.M - a.m) - tol:
            min_ok = False
        if b.M > a.M - p * (a.M - a.m) + tol:
            max_ok = False
        if b.delta > (1.0 - p) * a.delta + tol:
            dahiya_ok = False
        if two_ok is not None:
            slacks.append(two_factor * a.delta - b.delta)
            if b.delta > two_factor * a.delta + tol:
                two_ok = False
        worst = min(worst, *slacks)
    return ContractionVerdict(
        min_entry_ok=min_ok,
        max_entry_ok=max_ok,
        two_pmin_ok=two_ok,
        dahiya_ok=dahiya_ok,
        worst_slack=worst if worst != math.inf else 0.0,
    )


def _default_max_iter(p_min: float, tol: float) -> int:
    # 10x the iteration count implied by the geometric decay guarantee
    if p_min >= 1.0:
        return 10
    need = math.log(max(tol, 1e-300)) / math.log(1.0 - p_min)
    return max(10, int(10 * math.ceil(need)))


def stationary_by_envelope(
    P: StochasticMatrix, tol: float = 1e-10, max_iter: int | None = None
) -> StationaryResult:
    """Extract pi from the collapsing envelopes of every column at once.

    Non-positive ergodic chains are lifted to the m-step chain P^m first.
    Each pi_k is the midpoint of its final [m, M] interval, certified to
    half-width tol / 2.
    """
    report = analyze(P, with_primitivity=False)
    if not report.ergodic:
        raise NotErgodicError("envelope squeeze needs an ergodic chain")
    m = 1 if (P.entries > 0.0).all() else primitivity_exponent(P)
    B = power(P, m).entries
    p_min = float(B.min())
    if max_iter is None:
        max_iter = _default_max_iter(p_min, tol)
    S = B
    for it in range(1, max_iter + 1):
        lo = S.min(axis=0)
        hi = S.max(axis=0)
        worst = float((hi - lo).max())
        if worst <= tol:
            break
        S = S @ B
    else:
        raise MaxIterExceededError(
            f"envelopes at Delta = {worst:.3g} after {max_iter} iterations"
        )
    mid = (lo + hi) / 2.0
    pi = mid / mid.sum()
    return StationaryResult(
        pi=Distribution(P.space, pi),
        method="envelope",
        residual=stationary_residual(P, pi),
        evidence={
            "lift_exponent": m,
            "iterations": it,
            "max_half_width": worst / 2.0,
        },
    )


def mixing_estimate(
    P: StochasticMatrix, epsilon: float = 0.25, scan_cap: int = 100_000
) -> MixingEstimate:
    """Empirical mixing time by direct d(t) scan, next to the contraction
    bound m * ceil(ln(n / eps) / (2 p_min(P^m)) + 1) in original-chain steps.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    report = analyze(P)
    if not report.ergodic:
        raise NotErgodicError("mixing time is defined for ergodic chains only")
    m = report.primitivity_exponent
    assert m is not None
    pi = stationary_linear(P).pi
    pmin_m = power(P, m).min_entry()
    n = P.n
    bound = m * math.ceil(math.log(n / epsilon) / (2.0 * pmin_m) + 1.0)

    S = np.eye(n)
    t = 0
    while _tv_rows(S, pi.probs) > epsilon:
        S = S @ P.entries
        t += 1
        if t > min(bound, scan_cap):
            raise MaxIterExceededError(f"d(t) still above {epsilon} at t = {t}")
    return MixingEstimate(
        epsilon=epsilon,
        empirical_tmix=t,
        bound_tmix=bound,
        primitivity_m=m,
        pmin_of_Pm=pmin_m,
    )


def delta_curve(P: StochasticMatrix, horizon: int) -> list[float]:
    """max-over-columns envelope gap Delta^(t) for t = 1..horizon; the
    comparison curve for d(t) <= n * Delta^(t)."""
    S = P.entries
    out = []
    for _ in range(horizon):
        out.append(float((S.max(axis=0) - S.min(axis=0)).max()))
        S = S @ P.entries
    return out
