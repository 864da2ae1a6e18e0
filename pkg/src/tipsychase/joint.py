"""Exact joint-position oracle.

Builds the full Markov chain over ordered (cop, robber) vertex pairs on
any finite graph, then lumps it down to distance-style classes.  A
hand-derived family chain is trusted only after the lumped joint chain
matches it entry by entry.

Move rules
----------
* sober cop: a uniformly random neighbor minimizing the post-move hop
  distance to the robber;
* sober robber: a uniformly random neighbor maximizing the post-move
  hop distance, except he stays put when every neighbor would strictly
  close the gap (the only way to be "furthest already");
* tipsy: a uniformly random neighbor.

On a torus the hop-distance optimum is often a tie across axes, and the
reference 7x7 chain resolves it by acting on the larger axis gap first
(the cop shrinks it, the robber grows it).  ``tie_break`` hooks that
preference in: candidates are first filtered by hop distance, then by
the tie-break key (cop keeps the minimum key, robber the maximum).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chain as chain_mod
from .chain import MarkovChain
from .errors import GraphTooLarge, InvalidParameter, NotLumpable
from .families import SpinnerFour
from .graphs import Graph

MoveDistribution = dict[int, float]
TieBreak = Callable[[Graph, int, int], float]

LUMP_TOL = 1e-9


@dataclass(frozen=True)
class StrategyRules:
    """Per-player move distributions given (graph, cop, robber).

    ``hop_based`` marks rules of the standard shape (optimize hop
    distance, refine ties with ``tie_break``, split uniformly); the
    simulator exploits that structure to build its move tables with
    array operations instead of per-pair calls.
    """

    cop_move: Callable[[Graph, int, int], MoveDistribution]
    robber_move: Callable[[Graph, int, int], MoveDistribution]
    tipsy_move: Callable[[Graph, int], MoveDistribution]
    hop_based: bool = False
    tie_break: TieBreak | None = None


def _uniform(targets) -> MoveDistribution:
    share = 1.0 / len(targets)
    return {v: share for v in targets}


def _tipsy(g: Graph, v: int) -> MoveDistribution:
    return _uniform(g.neighbors[v])


def _refine(g: Graph, candidates, other: int, tie_break: TieBreak | None, pick_max: bool):
    if tie_break is None or len(candidates) == 1:
        return candidates
    keys = [tie_break(g, v, other) for v in candidates]
    best = max(keys) if pick_max else min(keys)
    return [v for v, k in zip(candidates, keys) if k == best]


def standard_rules(tie_break: TieBreak | None = None) -> StrategyRules:
    """The move rules above, with an optional secondary tie-break key."""

    def cop_move(g: Graph, cop: int, robber: int) -> MoveDistribution:
        dist = g.distance[robber]
        best = min(dist[v] for v in g.neighbors[cop])
        keep = [v for v in g.neighbors[cop] if dist[v] == best]
        return _uniform(_refine(g, keep, robber, tie_break, pick_max=False))

    def robber_move(g: Graph, cop: int, robber: int) -> MoveDistribution:
        dist = g.distance[cop]
        here = dist[robber]
        if all(dist[v] < here for v in g.neighbors[robber]):
            return {robber: 1.0}
        best = max(dist[v] for v in g.neighbors[robber])
        keep = [v for v in g.neighbors[robber] if dist[v] == best]
        return _uniform(_refine(g, keep, cop, tie_break, pick_max=True))

    return StrategyRules(
        cop_move=cop_move,
        robber_move=robber_move,
        tipsy_move=_tipsy,
        hop_based=True,
        tie_break=tie_break,
    )


def _axis_gaps(m: int, n: int, u: int, v: int) -> tuple[int, int]:
    du = abs(u // n - v // n)
    dv = abs(u % n - v % n)
    return min(du, m - du), min(dv, n - dv)


def torus_rules(m: int, n: int) -> StrategyRules:
    """Rules for an m x n torus: break hop-distance ties on the larger axis gap."""

    def widest_gap(g: Graph, mover: int, other: int) -> float:
        return float(max(_axis_gaps(m, n, mover, other)))

    return standard_rules(tie_break=widest_gap)


def pair_index(g: Graph, cop: int, robber: int) -> int:
    return cop * g.vertex_count + robber


def build_joint_chain(
    g: Graph, s: SpinnerFour, rules: StrategyRules, state_cap: int = 10**6
) -> MarkovChain:
    """Chain over all ordered (cop, robber) pairs; capture states absorb.

    Each non-capture row mixes the four one-player moves with the
    spinner weights.
    """
    V = g.vertex_count
    if V < 2:
        raise InvalidParameter("joint chain needs at least 2 vertices")
    n_states = V * V
    if n_states > state_cap:
        raise GraphTooLarge(f"{n_states} joint states exceed the cap of {state_cap}")

    P = np.zeros((n_states, n_states))
    absorbing = set()
    labels = []
    for cop in range(V):
        for robber in range(V):
            i = pair_index(g, cop, robber)
            labels.append(f"({cop},{robber})")
            if cop == robber:
                P[i, i] = 1.0
                absorbing.add(i)
                continue
            for target, prob in rules.cop_move(g, cop, robber).items():
                P[i, pair_index(g, target, robber)] += s.c * prob
            for target, prob in rules.tipsy_move(g, cop).items():
                P[i, pair_index(g, target, robber)] += s.t_c * prob
            for target, prob in rules.robber_move(g, cop, robber).items():
                P[i, pair_index(g, cop, target)] += s.r * prob
            for target, prob in rules.tipsy_move(g, robber).items():
                P[i, pair_index(g, cop, target)] += s.t_r * prob

    built = MarkovChain(tuple(labels), P, frozenset(absorbing))
    chain_mod.validate(built)
    return built


@dataclass(frozen=True)
class Lumping:
    """Assignment of every joint state to a class label.

    ``class_order`` fixes the state order of the lumped chain so it can
    be compared against a hand-built chain directly; capture states all
    belong to class "0".
    """

    class_order: tuple[str, ...]
    class_of: tuple[str, ...]

    def members(self, label: str) -> list[int]:
        return [i for i, lab in enumerate(self.class_of) if lab == label]

    def representative(self, label: str) -> int:
        for i, lab in enumerate(self.class_of):
            if lab == label:
                return i
        raise InvalidParameter(f"no state in class {label!r}")


def lump(chain_joint: MarkovChain, lumping: Lumping) -> MarkovChain:
    """Aggregate the joint chain over the partition, requiring exactness.

    Strong lumpability: within a class, every state's row must aggregate
    to the same class-level distribution (within 1e-9); otherwise the
    partition is not Markov-exact and NotLumpable reports the worst
    offender.
    """
    n = chain_joint.n_states
    if len(lumping.class_of) != n:
        raise InvalidParameter("lumping does not cover every joint state")
    order = {label: k for k, label in enumerate(lumping.class_order)}
    missing = set(lumping.class_of) - set(order)
    if missing:
        raise InvalidParameter(f"classes {sorted(missing)} missing from class_order")
    K = len(lumping.class_order)

    indicator = np.zeros((n, K))
    for i, label in enumerate(lumping.class_of):
        indicator[i, order[label]] = 1.0
    aggregated = chain_joint.P @ indicator

    P_lumped = np.zeros((K, K))
    absorbing = set()
    for label, k in order.items():
        members = lumping.members(label)
        if not members:
            raise InvalidParameter(f"class {label!r} has no members")
        rows = aggregated[members]
        spread = np.abs(rows - rows[0]).max(axis=1)
        worst = int(np.argmax(spread))
        if spread[worst] > LUMP_TOL:
            raise NotLumpable(label, (members[0], members[worst]), float(spread[worst]))
        P_lumped[k] = rows[0]
        if all(i in chain_joint.absorbing for i in members):
            absorbing.add(k)

    built = MarkovChain(tuple(lumping.class_order), P_lumped, frozenset(absorbing))
    chain_mod.validate(built)
    return built


def distance_lumping(g: Graph) -> Lumping:
    """Classes are plain hop distances: "0" (capture) up to the diameter."""
    V = g.vertex_count
    classes = [str(d) for d in range(g.diameter + 1)]
    labels = []
    for cop in range(V):
        for robber in range(V):
            labels.append(str(int(g.distance[cop, robber])))
    return Lumping(tuple(classes), tuple(labels))


def friendship_lumping(g: Graph) -> Lumping:
    """Classes 2 / 1cc / 1rc / 1e / 0 on a friendship graph (hub = 0)."""
    V = g.vertex_count
    labels = []
    for cop in range(V):
        for robber in range(V):
            if cop == robber:
                labels.append("0")
            elif g.distance[cop, robber] == 2:
                labels.append("2")
            elif cop == 0:
                labels.append("1cc")
            elif robber == 0:
                labels.append("1rc")
            else:
                labels.append("1e")
    return Lumping(("2", "1cc", "1rc", "1e", "0"), tuple(labels))


def torus_lumping(g: Graph, m: int, n: int) -> Lumping:
    """Classes are sorted per-axis gaps "(a,b)" with a >= b; capture is "0"."""
    if g.vertex_count != m * n:
        raise InvalidParameter(f"graph has {g.vertex_count} vertices, torus wants {m * n}")
    labels = []
    seen = set()
    for cop in range(m * n):
        for robber in range(m * n):
            if cop == robber:
                labels.append("0")
                continue
            a, b = _axis_gaps(m, n, cop, robber)
            label = f"({max(a, b)},{min(a, b)})"
            labels.append(label)
            seen.add(label)
    ordered = sorted(
        seen, key=lambda lab: tuple(-int(x) for x in lab.strip("()").split(","))
    )
    return Lumping(tuple(ordered + ["0"]), tuple(labels))
