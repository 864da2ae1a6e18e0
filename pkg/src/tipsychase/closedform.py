"""Gambler's-ruin closed forms for the game on infinite regular trees.

With up-step probability p = t(degree-1)/degree + r the distance walk
is the classic ruin chain on 0..n with both ends absorbing.  Writing
x = (1-p)/p, the robber's escape probability is

    R(d) = (1 - x^d) / (1 - x^n)        (p != 1/2)
    R(d) = d / n                        (p == 1/2)

and the expected game length is

    E(d) = (d - n * R(d)) / (1 - 2p)    (p != 1/2)
    E(d) = d * (n - d)                  (p == 1/2)

Both formulas have a removable singularity at p = 1/2; inside a 1e-9
window we switch to the fair-case forms to dodge the cancellation.
"""

from __future__ import annotations

import math

from .chain import INFINITE, ExpectationResult
from .errors import InvalidParameter
from .families import SpinnerThree

FAIR_WINDOW = 1e-9


def up_probability(degree: int, s: SpinnerThree) -> float:
    """Probability that one round increases the distance on the tree."""
    if degree < 2:
        raise InvalidParameter(f"tree degree must be >= 2, got {degree}")
    return s.t * (degree - 1) / degree + s.r


def _check_range(d: int, call_off: int, p: float) -> None:
    if not 1 <= d <= call_off - 1:
        raise InvalidParameter(f"start distance {d} outside 1..{call_off - 1}")
    if not 0.0 < p < 1.0:
        raise InvalidParameter(f"up probability {p!r} outside (0, 1)")


def escape_probability(d: int, call_off: int, p: float) -> float:
    """Probability the robber reaches the call-off distance before capture.

    Evaluated as expm1 ratios over log1p((1-2p)/p) = log((1-p)/p): that
    keeps full precision arbitrarily close to the fair point (the naive
    power ratio loses half its digits there) and cannot overflow for any
    ``call_off`` (the drift-dominated branch rescales by the exponential
    of a negative number).
    """
    _check_range(d, call_off, p)
    if abs(p - 0.5) < FAIR_WINDOW:
        return d / call_off
    log_x = math.log1p((1.0 - 2.0 * p) / p)
    if log_x > 0:  # cop-favored drift
        scale = math.exp((d - call_off) * log_x)
        return scale * math.expm1(-d * log_x) / math.expm1(-call_off * log_x)
    return math.expm1(d * log_x) / math.expm1(call_off * log_x)


def capture_probability(d: int, call_off: int, p: float) -> float:
    return 1.0 - escape_probability(d, call_off, p)


def expected_rounds_closed(d: int, call_off: int, p: float) -> ExpectationResult:
    """Expected game length with a call-off distance (always finite)."""
    _check_range(d, call_off, p)
    if abs(p - 0.5) < FAIR_WINDOW:
        return ExpectationResult(float(d * (call_off - d)))
    ratio = escape_probability(d, call_off, p)
    return ExpectationResult((d - call_off * ratio) / (1.0 - 2.0 * p))


def expected_rounds_unbounded(d: int, degree: int, s: SpinnerThree) -> ExpectationResult:
    """Expected capture time when the cop never gives up.

    Finite only when the walk drifts toward the cop (p < 1/2); otherwise
    the robber has positive escape probability and the expectation
    diverges.
    """
    if d < 1:
        raise InvalidParameter(f"start distance must be >= 1, got {d}")
    p = up_probability(degree, s)
    if p >= 0.5:
        return ExpectationResult(INFINITE, f"up probability {p:.6g} >= 1/2")
    return ExpectationResult(d / (1.0 - 2.0 * p))


def expected_rounds_degree_limit(d: int, c: float) -> ExpectationResult:
    """Large-degree limit of the unbounded chase: d / (2c - 1) for c > 1/2."""
    if d < 1:
        raise InvalidParameter(f"start distance must be >= 1, got {d}")
    if not 0.0 <= c <= 1.0:
        raise InvalidParameter(f"c = {c!r} is outside [0, 1]")
    if c <= 0.5:
        return ExpectationResult(INFINITE, f"sober-cop share {c:.6g} <= 1/2")
    return ExpectationResult(d / (2.0 * c - 1.0))
