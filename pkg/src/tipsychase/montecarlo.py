"""Seeded stochastic simulation of the pursuit game on a finite graph.

Reproducibility contract
------------------------
Trial ``k`` draws from its own counter-based stream::

    Generator(Philox(key=seed mod 2**64, counter=k * 2**64))

and consumes exactly two doubles per round: one to pick the spinner
outcome (cumulative thresholds c, c+r, c+r+t_c, 1) and one to pick the
moving player's target.  Reports therefore depend only on (seed, trial
index, round number) and are bitwise identical however trials are
batched or spread across workers.

Trials are simulated in lock-step batches with numpy for speed; the
per-trial streams make that purely an implementation detail.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, InvalidStart
from .families import SpinnerFour
from .graphs import Graph
from .joint import StrategyRules

PAIR_TABLE_CAP = 8_000_000  # entries; guards the dense (cop, robber) move tables


@dataclass(frozen=True)
class SimConfig:
    graph: Graph
    spinner: SpinnerFour
    rules: StrategyRules
    cop_start: int
    robber_start: int
    trials: int
    max_rounds: int
    seed: int
    escape_distance: int | None = None
    workers: int = 1


@dataclass(frozen=True)
class SimReport:
    """Empirical survival curve and game-length summary.

    ``survival_curve[m - 1]`` estimates the probability of lasting at
    least m rounds; its final entry equals ``censored_fraction``.  When
    any trial is censored, ``mean_rounds`` is only a lower bound for the
    true expectation (tail rounds beyond the cap are not extrapolated).
    """

    trials: int
    survival_curve: np.ndarray
    survival_se: np.ndarray
    mean_rounds: float
    mean_rounds_se: float
    mean_is_lower_bound: bool
    censored_fraction: float
    capture_fraction: float
    escape_fraction: float

    def survival(self, rounds: int) -> float:
        if rounds == 0:
            return 1.0
        return float(self.survival_curve[rounds - 1])

    def survival_stderr(self, rounds: int) -> float:
        if rounds == 0:
            return 0.0
        return float(self.survival_se[rounds - 1])


def _uniform_targets(dist: dict[int, float], where: str):
    """Targets of an equal-weight distribution (the only kind the rules emit)."""
    targets = sorted(dist)
    share = 1.0 / len(targets)
    for v in targets:
        if abs(dist[v] - share) > 1e-12:
            raise InvalidParameter(
                f"{where}: simulation supports uniform move distributions only"
            )
    return targets


def _padded_neighbors(g: Graph):
    V = g.vertex_count
    maxdeg = max(g.degree(v) for v in range(V))
    nbr = np.zeros((V, maxdeg), dtype=np.int32)
    deg = np.zeros(V, dtype=np.int32)
    for v in range(V):
        ns = g.neighbors[v]
        deg[v] = len(ns)
        nbr[v, : len(ns)] = ns
    return nbr, deg, maxdeg


def _tie_key_matrix(g: Graph, rules: StrategyRules):
    if rules.tie_break is None:
        return None
    V = g.vertex_count
    key = np.empty((V, V))
    for v in range(V):
        for w in range(V):
            key[v, w] = rules.tie_break(g, v, w)
    return key


def _pack_mask(rows, mask, tab, cnt, vertex_ids):
    """Write the True rows of ``mask`` (per column) into padded tables."""
    counts = mask.sum(axis=0)
    width = min(tab.shape[1], mask.shape[0])
    order = np.argsort(~mask, axis=0, kind="stable")[:width]
    packed = vertex_ids[order].T.astype(tab.dtype)
    packed[np.arange(width)[None, :] >= counts[:, None]] = 0
    tab[rows, :width] = packed
    cnt[rows] = counts


def _hop_move_tables(g: Graph, rules: StrategyRules, maxdeg):
    """Vectorized tables for hop-distance rules: one numpy pass per vertex."""
    V = g.vertex_count
    dist = g.distance
    key = _tie_key_matrix(g, rules)
    cop_tab = np.zeros((V * V, maxdeg), dtype=np.int32)
    cop_cnt = np.zeros(V * V, dtype=np.int32)
    rob_tab = np.zeros((V * V, maxdeg + 1), dtype=np.int32)  # +1: robber may stay
    rob_cnt = np.zeros(V * V, dtype=np.int32)

    for v in range(V):
        ns = np.array(g.neighbors[v], dtype=np.int64)
        D = dist[ns]  # (deg, V): distance from each neighbor to every opponent
        rows_cop = v * V + np.arange(V)

        mask = D == D.min(axis=0)
        if key is not None:
            Kc = key[ns]
            best = np.where(mask, Kc, np.inf).min(axis=0)
            mask &= Kc == best
        _pack_mask(rows_cop, mask, cop_tab, cop_cnt, ns)

        # robber at v against every cop position w (pairs w * V + v)
        rows_rob = np.arange(V) * V + v
        here = dist[v]
        mask = D == D.max(axis=0)
        if key is not None:
            Kr = key[ns]
            best = np.where(mask, Kr, -np.inf).max(axis=0)
            mask &= Kr == best
        _pack_mask(rows_rob, mask, rob_tab, rob_cnt, ns)
        stay = (D < here).all(axis=0)
        if stay.any():
            idx = rows_rob[stay]
            rob_tab[idx, 0] = v
            rob_cnt[idx] = 1

    return cop_tab, cop_cnt, rob_tab, rob_cnt


def _generic_move_tables(g: Graph, rules: StrategyRules, maxdeg):
    """Fallback tables built by calling the rule functions pair by pair."""
    V = g.vertex_count
    cop_tab = np.zeros((V * V, maxdeg), dtype=np.int32)
    cop_cnt = np.zeros(V * V, dtype=np.int32)
    rob_tab = np.zeros((V * V, maxdeg + 1), dtype=np.int32)
    rob_cnt = np.zeros(V * V, dtype=np.int32)
    for cop in range(V):
        for robber in range(V):
            if cop == robber:
                continue
            pair = cop * V + robber
            targets = _uniform_targets(rules.cop_move(g, cop, robber), "cop_move")
            cop_cnt[pair] = len(targets)
            cop_tab[pair, : len(targets)] = targets
            targets = _uniform_targets(rules.robber_move(g, cop, robber), "robber_move")
            rob_cnt[pair] = len(targets)
            rob_tab[pair, : len(targets)] = targets
    return cop_tab, cop_cnt, rob_tab, rob_cnt


def _move_tables(g: Graph, rules: StrategyRules):
    """Dense per-pair sober-move tables plus padded neighbor lists."""
    V = g.vertex_count
    nbr, deg, maxdeg = _padded_neighbors(g)
    if V * V * maxdeg > PAIR_TABLE_CAP:
        raise InvalidParameter(
            f"graph too large for simulation move tables "
            f"({V} vertices, max degree {maxdeg})"
        )
    build = _hop_move_tables if rules.hop_based else _generic_move_tables
    cop_tab, cop_cnt, rob_tab, rob_cnt = build(g, rules, maxdeg)
    return nbr, deg, cop_tab, cop_cnt, rob_tab, rob_cnt


_BLOCK_ROUNDS = 128
_COUNTERS_PER_BLOCK = 2 * _BLOCK_ROUNDS // 4  # Philox emits 4 uint64 per counter tick


def _refill(bit_gen, gen, state, draws, local_rows, first_trial, block_index):
    """Fill each row's next block of doubles from its trial's own stream.

    One Philox instance is repositioned per trial instead of constructing
    a fresh one: trial k's stream starts at counter k * 2**64, and each
    block of 2 * _BLOCK_ROUNDS doubles advances the counter by exactly
    _COUNTERS_PER_BLOCK ticks.
    """
    counter = state["state"]["counter"]
    counter[0] = block_index * _COUNTERS_PER_BLOCK
    for row in local_rows:
        counter[1] = first_trial + row
        bit_gen.state = state
        draws[row] = gen.random(2 * _BLOCK_ROUNDS)


def _run_batch(cfg: SimConfig, tables, lo: int, hi: int, rounds_out, outcome_out):
    """Simulate trials lo..hi-1 in lock-step; write per-trial results."""
    nbr, deg, cop_tab, cop_cnt, rob_tab, rob_cnt = tables
    V = cfg.graph.vertex_count
    dist = cfg.graph.distance
    s = cfg.spinner
    thresholds = np.array([s.c, s.c + s.r, s.c + s.r + s.t_c, 1.0])
    key = cfg.seed & 0xFFFFFFFFFFFFFFFF

    size = hi - lo
    bit_gen = np.random.Philox(key=key)
    gen = np.random.Generator(bit_gen)
    state = bit_gen.state  # template; only the counter words get rewritten

    cop = np.full(size, cfg.cop_start, dtype=np.int64)
    rob = np.full(size, cfg.robber_start, dtype=np.int64)
    alive = np.arange(size)
    draws = np.empty((size, 2 * _BLOCK_ROUNDS))
    rounds_done = 0
    block_index = 0

    while alive.size and rounds_done < cfg.max_rounds:
        _refill(bit_gen, gen, state, draws, alive, lo, block_index)
        block_index += 1
        block = min(_BLOCK_ROUNDS, cfg.max_rounds - rounds_done)
        for j in range(block):
            u_outcome = draws[alive, 2 * j]
            u_move = draws[alive, 2 * j + 1]
            category = np.searchsorted(thresholds, u_outcome, side="right")

            ca, ra = cop[alive], rob[alive]
            pair = ca * V + ra
            new_cop = ca.copy()
            new_rob = ra.copy()

            mask = category == 0  # sober cop
            if mask.any():
                p, u = pair[mask], u_move[mask]
                cnt = cop_cnt[p]
                pick = np.minimum((u * cnt).astype(np.int64), cnt - 1)
                new_cop[mask] = cop_tab[p, pick]
            mask = category == 1  # sober robber
            if mask.any():
                p, u = pair[mask], u_move[mask]
                cnt = rob_cnt[p]
                pick = np.minimum((u * cnt).astype(np.int64), cnt - 1)
                new_rob[mask] = rob_tab[p, pick]
            mask = category == 2  # tipsy cop
            if mask.any():
                v, u = ca[mask], u_move[mask]
                cnt = deg[v]
                pick = np.minimum((u * cnt).astype(np.int64), cnt - 1)
                new_cop[mask] = nbr[v, pick]
            mask = category == 3  # tipsy robber
            if mask.any():
                v, u = ra[mask], u_move[mask]
                cnt = deg[v]
                pick = np.minimum((u * cnt).astype(np.int64), cnt - 1)
                new_rob[mask] = nbr[v, pick]

            cop[alive] = new_cop
            rob[alive] = new_rob

            captured = new_cop == new_rob
            if cfg.escape_distance is not None:
                escaped = dist[new_cop, new_rob] >= cfg.escape_distance
                escaped &= ~captured
            else:
                escaped = np.zeros_like(captured)
            done = captured | escaped
            if done.any():
                ended = alive[done]
                rounds_out[lo + ended] = rounds_done + j + 1
                outcome_out[lo + ended] = np.where(captured[done], 0, 1)
                alive = alive[~done]
                if not alive.size:
                    break
        rounds_done += block

    if alive.size:
        rounds_out[lo + alive] = cfg.max_rounds + 1
        outcome_out[lo + alive] = 2


def run(cfg: SimConfig) -> SimReport:
    """Run all trials and reduce them (in trial order) into a SimReport."""
    if cfg.trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {cfg.trials}")
    if cfg.max_rounds < 1:
        raise InvalidParameter(f"max_rounds must be >= 1, got {cfg.max_rounds}")
    V = cfg.graph.vertex_count
    if not (0 <= cfg.cop_start < V and 0 <= cfg.robber_start < V):
        raise InvalidStart("start positions out of range")
    if cfg.cop_start == cfg.robber_start:
        raise InvalidStart("cop and robber must start on distinct vertices")
    if cfg.escape_distance is not None:
        if cfg.escape_distance < 1:
            raise InvalidParameter("escape_distance must be >= 1")
        if cfg.graph.distance[cfg.cop_start, cfg.robber_start] >= cfg.escape_distance:
            raise InvalidStart("start positions already at or past the escape distance")

    tables = _move_tables(cfg.graph, cfg.rules)
    rounds = np.zeros(cfg.trials, dtype=np.int64)
    outcome = np.zeros(cfg.trials, dtype=np.int8)

    batch = 8192
    spans = [(lo, min(lo + batch, cfg.trials)) for lo in range(0, cfg.trials, batch)]
    if cfg.workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            jobs = [
                pool.submit(_run_batch, cfg, tables, lo, hi, rounds, outcome)
                for lo, hi in spans
            ]
            for job in jobs:
                job.result()
    else:
        for lo, hi in spans:
            _run_batch(cfg, tables, lo, hi, rounds, outcome)

    # rounds > m  <=>  still unabsorbed after m rounds (censored trials
    # carry max_rounds + 1 and so count as surviving every m)
    counts = np.bincount(np.minimum(rounds, cfg.max_rounds + 1), minlength=cfg.max_rounds + 2)
    still_in = cfg.trials - np.cumsum(counts)[1 : cfg.max_rounds + 1]
    curve = still_in / cfg.trials
    se = np.sqrt(curve * (1.0 - curve) / cfg.trials)

    uncensored = rounds[outcome != 2]
    if uncensored.size:
        mean = float(uncensored.mean())
        spread = float(uncensored.std(ddof=1)) if uncensored.size > 1 else 0.0
        mean_se = spread / np.sqrt(uncensored.size)
    else:
        mean, mean_se = float(cfg.max_rounds), 0.0
    censored = float(np.mean(outcome == 2))

    return SimReport(
        trials=cfg.trials,
        survival_curve=curve,
        survival_se=se,
        mean_rounds=mean,
        mean_rounds_se=float(mean_se),
        mean_is_lower_bound=censored > 0.0,
        censored_fraction=censored,
        capture_fraction=float(np.mean(outcome == 0)),
        escape_fraction=float(np.mean(outcome == 1)),
    )
