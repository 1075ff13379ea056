"""Processor-complexity versus computation-length trade-off formulas.

Widening a machine's per-step word from b to delta*b inflates its control
size by roughly delta * Gamma_delta with Gamma_delta ~ 2^((m+n)(delta-1)),
while cutting the step count by up to delta.  The resulting cost ratio

    C'/C >= (1/delta) * (delta*Gamma_delta*S + I_eff) / (S + I_eff)

tends to 1/delta for tape-dominated computations and to Gamma_delta for
control-dominated ones.  The published stationarity condition for the
minimum is

    omega = delta^2 * 2^((m+n)(delta-1)) * (m+n) / ln(2),      (*)

with omega = I_eff/S, which puts the optimum at delta = 1 exactly when
S = ln(2)/(m+n) * I_eff.

Note: differentiating the cost ratio itself yields the same expression
with the ln(2) factor multiplying instead of dividing (the derivative of
2^(a*delta) carries a*ln(2)); the numeric minimizer of the cost ratio
therefore sits at self_consistent_omega's root, not at (*)'s.  Both
conditions are implemented; (*) stays the published default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TradeoffPoint:
    state_bits: int
    symbol_bits: int
    move_bits: int
    fsm_bits: float
    effective_tape_bits: float
    delta: float

    @property
    def omega(self) -> float:
        return self.effective_tape_bits / self.fsm_bits


def gamma_delta(
    delta: float,
    state_bits: int,
    symbol_bits: int,
    exact: tuple[int, int, float, float] | None = None,
) -> float:
    """Control-size inflation factor.

    Default approximation 2^((m+n)(delta-1)); with ``exact`` = (M, N,
    delta1, delta2) returns M^(delta1-1) * N^(delta2-1).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if exact is not None:
        m_count, n_count, d1, d2 = exact
        log2 = (d1 - 1) * math.log2(m_count) + (d2 - 1) * math.log2(n_count)
    else:
        log2 = (state_bits + symbol_bits) * (delta - 1)
    return math.exp2(log2) if log2 < 1024 else math.inf


def cost_ratio(delta: float, fsm_bits: float, effective_tape_bits: float,
               state_bits: int, symbol_bits: int) -> float:
    """Lower bound on C'/C after rescaling the word width by delta.

    Evaluated in log space so huge Gamma_delta values do not overflow.
    """
    if delta <= 0 or fsm_bits <= 0 or effective_tape_bits < 0:
        raise ValueError("need delta > 0, S > 0, I_eff >= 0")
    log2_gs = (state_bits + symbol_bits) * (delta - 1) + math.log2(delta * fsm_bits)
    if effective_tape_bits > 0:
        log2_num = _log2_add(log2_gs, math.log2(effective_tape_bits))
    else:
        log2_num = log2_gs
    log2_den = math.log2(delta * (fsm_bits + effective_tape_bits))
    out = log2_num - log2_den
    return math.exp2(out) if out < 1024 else math.inf


def _log2_add(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log2(1.0 + math.exp2(lo - hi))


def stationarity_omega(delta: float, state_bits: int, symbol_bits: int) -> float:
    """Published tape-to-control ratio at which ``delta`` is stationary:
    omega = delta^2 * 2^((m+n)(delta-1)) * (m+n)/ln(2)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    mn = state_bits + symbol_bits
    return delta * delta * math.exp2(mn * (delta - 1)) * mn / math.log(2)


def self_consistent_omega(delta: float, state_bits: int, symbol_bits: int) -> float:
    """Stationarity condition actually satisfied by cost_ratio's minimizer
    (ln(2) multiplying, from d/ddelta 2^(a*delta) = a*ln(2)*2^(a*delta))."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    mn = state_bits + symbol_bits
    return delta * delta * math.exp2(mn * (delta - 1)) * mn * math.log(2)


def _invert_monotone(fn, omega: float, tol: float = 1e-9) -> float:
    if omega <= 0:
        raise ValueError("omega must be positive")
    lo, hi = 1e-12, 1.0
    while fn(hi) < omega:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError("no root in bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) < omega:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_delta(omega: float, state_bits: int, symbol_bits: int, tol: float = 1e-9) -> float:
    """Invert the published stationarity condition by bisection; the curve
    is strictly increasing in delta, so the root is unique."""
    return _invert_monotone(lambda d: stationarity_omega(d, state_bits, symbol_bits), omega, tol)


def self_consistent_optimal_delta(omega: float, state_bits: int, symbol_bits: int,
                                  tol: float = 1e-9) -> float:
    return _invert_monotone(lambda d: self_consistent_omega(d, state_bits, symbol_bits), omega, tol)


def argmin_delta(fsm_bits: float, effective_tape_bits: float, state_bits: int,
                 symbol_bits: int, tol: float = 1e-10) -> float:
    """Golden-section minimizer of cost_ratio over delta.

    The ratio is (Gamma*S + I/delta)/(S+I) up to constants: convex in
    delta, so the interior minimum is unique.
    """
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo = 1e-6
    hi = 2.0
    while cost_ratio(hi * 2, fsm_bits, effective_tape_bits, state_bits, symbol_bits) <= \
            cost_ratio(hi, fsm_bits, effective_tape_bits, state_bits, symbol_bits):
        hi *= 2
        if hi > 1e6:
            break
    hi *= 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc = cost_ratio(c, fsm_bits, effective_tape_bits, state_bits, symbol_bits)
    fd = cost_ratio(d, fsm_bits, effective_tape_bits, state_bits, symbol_bits)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = cost_ratio(c, fsm_bits, effective_tape_bits, state_bits, symbol_bits)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = cost_ratio(d, fsm_bits, effective_tape_bits, state_bits, symbol_bits)
    return 0.5 * (a + b)


def ratio_table(fsm_bits: float, effective_tape_bits: float, state_bits: int,
                symbol_bits: int, deltas) -> list[tuple[float, float]]:
    """(delta, cost ratio) rows for plotting."""
    return [
        (d, cost_ratio(d, fsm_bits, effective_tape_bits, state_bits, symbol_bits))
        for d in deltas
    ]
