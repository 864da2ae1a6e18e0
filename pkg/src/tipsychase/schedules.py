"""Tipsiness that changes over time or with distance.

Time-varying: round m plays with t = f(m), and the sober remainder
1 - t is split between the players by a fixed share.  Survival over M
rounds is the product of the per-round transient matrices,

    G_M(d) = e_d . (T_1 T_2 ... T_M) . 1

and the expected game length is the series of its partial products,

    E(d) = e_d . (sum_{n>=1} prod_{m<n} T_m) . 1

whose terms are the survival probabilities G_{n-1}(d).  The series has
no closed form, so it is summed with an explicit stopping rule (see
``time_varying_expectation``).

Distance-varying: state d of a cycle or tree chain plays with
t_d = delta(d); the chain itself is static, so the ordinary matrix
machinery applies once the rows are assembled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chain as chain_mod
from .chain import INFINITE, MarkovChain, TransientSystem
from .errors import InvalidParameter, ScheduleOutOfRange
from .families import SpinnerThree

ChainBuilder = Callable[[SpinnerThree], MarkovChain]


@dataclass(frozen=True)
class SoberSplit:
    """Fraction of the sober probability mass handed to the robber."""

    robber_share: float

    def __post_init__(self):
        if not 0.0 <= self.robber_share <= 1.0:
            raise InvalidParameter(f"robber_share = {self.robber_share!r} outside [0, 1]")

    def spinner(self, tipsiness: float) -> SpinnerThree:
        return SpinnerThree.from_split(tipsiness, self.robber_share)


@dataclass(frozen=True)
class TimeSchedule:
    """Tipsiness as a function of the 1-based round index.

    ``limit`` is the value f tends to; the built-ins decay to zero.  A
    custom schedule with f(1) != 1 is accepted with a warning (the
    matrix algebra does not need the first round to be fully tipsy).
    """

    fn: Callable[[int], float]
    name: str = "custom"
    limit: float = 0.0

    def at(self, m: int) -> float:
        value = float(self.fn(m))
        if not 0.0 <= value <= 1.0:
            raise ScheduleOutOfRange(f"{self.name}: f({m}) = {value!r} outside [0, 1]")
        return value

    def warn_if_nonstandard(self):
        if abs(self.at(1) - 1.0) > 1e-12:
            warnings.warn(
                f"time schedule {self.name!r} has f(1) = {self.at(1):.6g}, not 1",
                stacklevel=3,
            )

    @classmethod
    def hyperbolic(cls, num: float = 4.0, shift: float = 3.0) -> "TimeSchedule":
        """f(m) = num / (m + shift)."""
        return cls(lambda m: num / (m + shift), f"hyper:{num:g},{shift:g}")

    @classmethod
    def exponential2(cls, num: float = 4.0, shift: float = 2.0) -> "TimeSchedule":
        """f(m) = num / (2^m + shift)."""
        return cls(lambda m: num / (2.0**m + shift), f"exp2:{num:g},{shift:g}")


@dataclass(frozen=True)
class DistanceSchedule:
    """Tipsiness as a function of the current distance state."""

    delta: Callable[[int], float]
    name: str = "custom"

    def at(self, d: int) -> float:
        value = float(self.delta(d))
        if not 0.0 <= value <= 1.0:
            raise ScheduleOutOfRange(f"{self.name}: delta({d}) = {value!r} outside [0, 1]")
        return value

    def warn_if_nonstandard(self):
        if abs(self.at(1)) > 1e-12:
            warnings.warn(
                f"distance schedule {self.name!r} has delta(1) = {self.at(1):.6g}, not 0",
                stacklevel=3,
            )

    @classmethod
    def linear(cls, max_distance: int) -> "DistanceSchedule":
        """delta(d) = (d - 1) / max_distance."""
        if max_distance < 1:
            raise InvalidParameter(f"max_distance must be >= 1, got {max_distance}")
        return cls(lambda d: (d - 1) / max_distance, f"linear:{max_distance}")

    @classmethod
    def exponential(cls, base: float = 1.2) -> "DistanceSchedule":
        """delta(d) = (1 - base^(1-d)) / (1 + base^(1-d))."""
        if base <= 1.0:
            raise InvalidParameter(f"base must be > 1, got {base}")
        return cls(
            lambda d: (1.0 - base ** (1 - d)) / (1.0 + base ** (1 - d)), f"exp:{base:g}"
        )


@dataclass(frozen=True)
class SeriesResult:
    """Partial-sum evaluation of the expectation series."""

    value: float
    terms_used: int
    truncation_bound: float
    converged: bool

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _transient_of(builder: ChainBuilder, spinner: SpinnerThree) -> TransientSystem:
    return chain_mod.extract_transient(builder(spinner))


def time_varying_survival(
    builder: ChainBuilder, split: SoberSplit, sched: TimeSchedule, d, rounds: int
) -> float:
    """G_M(d) for the round-indexed chain family T_1 ... T_M."""
    if rounds < 0:
        raise InvalidParameter(f"rounds must be >= 0, got {rounds}")
    sched.warn_if_nonstandard()
    first = _transient_of(builder, split.spinner(sched.at(1)))
    idx = first.index(d)
    vec = np.ones(first.n_transient)
    prev_t = None
    for m in range(rounds, 0, -1):
        t_m = sched.at(m)
        if prev_t is not None and t_m < prev_t - 1e-12:
            warnings.warn(f"time schedule {sched.name!r} increases at m={m + 1}")
        prev_t = t_m
        ts = first if m == 1 else _transient_of(builder, split.spinner(t_m))
        if ts.n_transient != first.n_transient:
            raise InvalidParameter("builder changed transient dimension across rounds")
        vec = ts.T @ vec
    return float(vec[idx])


def _limit_profile(builder: ChainBuilder, split: SoberSplit, sched: TimeSchedule):
    """Expected-remaining-rounds vector of the limiting chain, or None.

    None means the limiting chain does not absorb from every state, so
    the series cannot converge (the classic case: the whole sober mass
    on the robber, who then flees forever once sobered up).
    """
    ts = _transient_of(builder, split.spinner(sched.limit))
    solved = chain_mod._fundamental_solve(ts)
    if solved is None:
        return None
    expected, absorb = solved
    totals = absorb.sum(axis=1) if absorb.shape[1] else np.zeros(ts.n_transient)
    if (totals < 1.0 - chain_mod.ABSORPTION_TOL).any():
        return None
    return expected


def time_varying_expectation(
    builder: ChainBuilder,
    split: SoberSplit,
    sched: TimeSchedule,
    d,
    tol: float = 1e-9,
    n_max: int = 10000,
) -> SeriesResult:
    """Partial sums of the expectation series with a computable stop rule.

    Term n is the survival probability G_{n-1}(d), accumulated by
    carrying the row vector u_n = e_d . T_1 ... T_{n-1} forward.  The
    tail after term n is estimated as u_{n+1} dotted with the limiting
    chain's expected-remaining-rounds vector (exact if every later
    round already played at the limiting tipsiness); we stop when both
    that estimate and the current term fall below ``tol``.  When the
    limiting chain is not absorbing the series diverges and the result
    is INFINITE outright.
    """
    if tol <= 0:
        raise InvalidParameter(f"tol must be > 0, got {tol}")
    if n_max < 1:
        raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
    sched.warn_if_nonstandard()

    tail_profile = _limit_profile(builder, split, sched)
    if tail_profile is None:
        return SeriesResult(INFINITE, 0, INFINITE, False)

    first = _transient_of(builder, split.spinner(sched.at(1)))
    idx = first.index(d)
    row = np.zeros(first.n_transient)
    row[idx] = 1.0

    total = 0.0
    term = 1.0
    tail = INFINITE
    n = 0
    for n in range(1, n_max + 1):
        term = float(row.sum())
        total += term
        ts = first if n == 1 else _transient_of(builder, split.spinner(sched.at(n)))
        row = row @ ts.T
        tail = float(row @ tail_profile)
        if term < tol and tail < tol:
            return SeriesResult(total, n, tail, True)
    return SeriesResult(total, n, tail, tail < tol)


def distance_cycle_chain(
    n: int, split: SoberSplit, sched: DistanceSchedule, boundary: str = "matrix"
) -> MarkovChain:
    """Cycle distance chain where row d plays with tipsiness delta(d).

    Even cycles keep the sober robber pinned at the maximum distance
    (self-loop r_max, drop c_max + t_max); odd cycles use the half-tipsy
    split there like the static builder.

    ``boundary`` selects the tipsiness fed to the maximum-distance row:
    "matrix" (default) evaluates delta at the maximum distance itself;
    "tables" reuses delta(max - 1) there, which is what the run behind
    the bundled reference tables did.  The two agree at robber_share 0
    and drift apart as the robber's sober share grows.
    """
    if n < 3:
        raise InvalidParameter(f"cycle needs n >= 3, got {n}")
    if boundary not in ("matrix", "tables"):
        raise InvalidParameter(f"boundary must be 'matrix' or 'tables', got {boundary!r}")
    sched.warn_if_nonstandard()
    m = n // 2
    P = np.zeros((m + 1, m + 1))
    P[0, 0] = 1.0
    for d in range(1, m):
        s = split.spinner(sched.at(d))
        P[d, d - 1] = s.c + s.t / 2.0
        P[d, d + 1] = s.r + s.t / 2.0
    s = split.spinner(sched.at(m if boundary == "matrix" or m == 1 else m - 1))
    if n % 2 == 0:
        P[m, m - 1] = s.c + s.t
        P[m, m] = s.r
    else:
        P[m, m - 1] = s.c + s.t / 2.0
        P[m, m] = s.r + s.t / 2.0
    built = MarkovChain(tuple(str(d) for d in range(m + 1)), P, frozenset({0}))
    chain_mod.validate(built)
    return built


def distance_tree_chain(
    degree: int, call_off: int, split: SoberSplit, sched: DistanceSchedule
) -> MarkovChain:
    """Tree distance chain with per-state tipsiness; both ends absorb."""
    if degree < 2:
        raise InvalidParameter(f"tree degree must be >= 2, got {degree}")
    if call_off < 2:
        raise InvalidParameter(f"call-off distance must be >= 2, got {call_off}")
    sched.warn_if_nonstandard()
    P = np.zeros((call_off + 1, call_off + 1))
    P[0, 0] = 1.0
    P[call_off, call_off] = 1.0
    for d in range(1, call_off):
        s = split.spinner(sched.at(d))
        P[d, d - 1] = s.c + s.t / degree
        P[d, d + 1] = s.r + s.t * (degree - 1) / degree
    built = MarkovChain(
        tuple(str(d) for d in range(call_off + 1)), P, frozenset({0, call_off})
    )
    chain_mod.validate(built)
    return built


_TIME_TOKENS = ("hyper", "exp2")
_DISTANCE_TOKENS = ("linear", "exp12")


def parse_schedule(token: str, max_distance: int | None = None):
    """Parse the CLI schedule mini-language.

    Time schedules: ``hyper:NUM,SHIFT`` (NUM/(m+SHIFT), default 4,3) and
    ``exp2:NUM,SHIFT`` (NUM/(2^m+SHIFT), default 4,2).  Distance
    schedules: ``linear`` ((d-1)/max_distance) and ``exp12`` (the base-
    1.2 ramp).  Returns a TimeSchedule or DistanceSchedule.
    """
    name, _, argtext = token.partition(":")
    args = [float(x) for x in argtext.split(",")] if argtext else []
    if name == "hyper":
        return TimeSchedule.hyperbolic(*args) if args else TimeSchedule.hyperbolic()
    if name == "exp2":
        return TimeSchedule.exponential2(*args) if args else TimeSchedule.exponential2()
    if name == "linear":
        if max_distance is None:
            raise InvalidParameter("schedule 'linear' needs the chain's maximum distance")
        return DistanceSchedule.linear(max_distance)
    if name == "exp12":
        return DistanceSchedule.exponential(*args) if args else DistanceSchedule.exponential()
    raise InvalidParameter(
        f"unknown schedule {token!r}; time schedules: hyper:N,S exp2:N,S; "
        f"distance schedules: linear exp12"
    )
