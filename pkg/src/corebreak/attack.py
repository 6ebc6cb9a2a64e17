"""Edge- and node-deletion attacks that collapse the innermost core.

Every strategy works on a private :class:`IncrementalCore` over the whole
graph with the threshold pinned to the original degeneracy ``I``, and stops
when that I-core is empty.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from .graph_core import (
    Edge,
    Graph,
    IncrementalCore,
    NoCoreError,
    canonical,
    core_decompose,
    delete_edges,
)
from .metrics import MetricsReport, QTrajectory, TrajectoryRecorder, compute_metrics


class Strategy(str, enum.Enum):
    RED = "red"
    HDE = "hde"
    HDN = "hdn"
    CKC = "ckc"
    COREATTACK = "coreattack"
    GREEDY = "greedy"
    EXHAUSTIVE = "exhaustive"

    @property
    def randomized(self) -> bool:
        return self in (Strategy.RED, Strategy.COREATTACK, Strategy.GREEDY)

    @property
    def deletes_nodes(self) -> bool:
        return self in (Strategy.HDN, Strategy.CKC)


class EdgeNotInCoreError(KeyError):
    pass


class SearchBoundError(ValueError):
    pass


@dataclass(frozen=True)
class GainerSet:
    edge: Edge
    gainers: frozenset[int]


@dataclass(frozen=True)
class AttackBudgetEstimate:
    d: int
    combination_count: int


@dataclass
class AttackResult:
    strategy: Strategy
    deleted_edges: list[Edge]
    deleted_nodes: list[int]
    trajectory: QTrajectory
    seed: int | None
    terminal_metrics: MetricsReport
    attacked: Graph = field(repr=False, compare=False)

    @property
    def nde(self) -> int:
        return self.terminal_metrics.nde

    def to_dict(self, g: Graph, trajectory_ref: str | None = None) -> dict:
        labels = g.node_labels
        return {
            "strategy": self.strategy.value,
            "seed": self.seed,
            "deleted_edges": [[labels[u], labels[v]] for u, v in self.deleted_edges],
            "deleted_nodes": [labels[v] for v in self.deleted_nodes],
            "metrics": self.terminal_metrics.to_dict(),
            "trajectory": trajectory_ref,
        }

    def to_json(self, g: Graph, trajectory_ref: str | None = None) -> str:
        return json.dumps(self.to_dict(g, trajectory_ref), indent=2, default=str)


def _original_core(g: Graph) -> tuple[int, IncrementalCore]:
    if g.edge_count == 0:
        raise NoCoreError("no core structure: graph has no edges")
    I = core_decompose(g).k_max
    return I, IncrementalCore.from_graph(g, I)


def gainer_set(g: Graph, I: int, e: tuple[int, int]) -> GainerSet:
    """Nodes that drop out of the I-core of ``g`` when edge ``e`` is deleted."""
    state = IncrementalCore.from_graph(g, I)
    u, v = e
    if not (0 <= u < len(g) and 0 <= v < len(g)) or not (
        state.in_core[u] and state.in_core[v] and g.has_edge(u, v)
    ):
        raise EdgeNotInCoreError(f"edge not in innermost core: {e}")
    return GainerSet(canonical(u, v), frozenset(state.gainers(u, v)))


def _pick(rng: np.random.Generator, items: list):
    return items[int(rng.integers(len(items)))]


def _finish(
    g: Graph,
    strategy: Strategy,
    seed: int | None,
    deleted_edges: list[Edge],
    deleted_nodes: list[int],
    trajectory: QTrajectory,
) -> AttackResult:
    attacked = delete_edges(g, deleted_edges)
    metrics = compute_metrics(g, core_decompose(g), attacked, deleted_nodes)
    return AttackResult(strategy, deleted_edges, deleted_nodes, trajectory, seed, metrics, attacked)


def core_attack(g: Graph, seed: int) -> AttackResult:
    """Corona-covering attack.

    Each round samples corona nodes until the gainer sets of the chosen
    edges cover the whole corona, all against the core as it stood at the
    start of the round, then deletes the batch and re-extracts the I-core.
    """
    I, state = _original_core(g)
    rng = np.random.default_rng(seed)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    while not state.empty:
        pending = state.corona()
        batch: list[Edge] = []
        while pending:
            vi = _pick(rng, pending)
            vj = _pick(rng, state.core_neighbors(vi))
            gam = state.gainers(vi, vj)
            pending = [c for c in pending if c not in gam]
            e = canonical(vi, vj)
            if e not in batch:
                batch.append(e)
        for u, v in batch:
            state.delete_edge(u, v)
            rec.edge_deleted(u, v)
        deleted.extend(batch)
    return _finish(g, Strategy.COREATTACK, seed, deleted, [], rec.trajectory)


def greedy_core_attack(g: Graph, seed: int) -> AttackResult:
    """Delete one bomb edge per round: the sampled corona edge with the largest gainer set."""
    I, state = _original_core(g)
    rng = np.random.default_rng(seed)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    while not state.empty:
        pending = state.corona()
        best: Edge | None = None
        tau = 0
        while pending:
            vi = _pick(rng, pending)
            vj = _pick(rng, state.core_neighbors(vi))
            gam = state.gainers(vi, vj)
            if len(gam) > tau:
                tau = len(gam)
                best = canonical(vi, vj)
            pending = [c for c in pending if c not in gam]
        # a corona endpoint always falls, so tau >= 1 and best is set
        assert best is not None
        state.delete_edge(*best)
        rec.edge_deleted(*best)
        deleted.append(best)
    return _finish(g, Strategy.GREEDY, seed, deleted, [], rec.trajectory)


def red_attack(g: Graph, seed: int) -> AttackResult:
    I, state = _original_core(g)
    rng = np.random.default_rng(seed)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    while not state.empty:
        e = _pick(rng, state.core_edges())
        state.delete_edge(*e)
        rec.edge_deleted(*e)
        deleted.append(e)
    return _finish(g, Strategy.RED, seed, deleted, [], rec.trajectory)


def hde_attack(g: Graph) -> AttackResult:
    """Highest edge degree first: deg(u) + deg(v) inside the current core, ties to the smaller pair."""
    I, state = _original_core(g)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    while not state.empty:
        deg = state.core_deg
        best, score = None, -1
        for u, v in state.core_edges():
            s = deg[u] + deg[v]
            if s > score:
                best, score = (u, v), s
        state.delete_edge(*best)
        rec.edge_deleted(*best)
        deleted.append(best)
    return _finish(g, Strategy.HDE, None, deleted, [], rec.trajectory)


def hdn_attack(g: Graph) -> AttackResult:
    I, state = _original_core(g)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    nodes: list[int] = []
    while not state.empty:
        target = max(state.core_nodes(), key=lambda v: (state.core_deg[v], -v))
        removed, _ = state.remove_node(target)
        rec.node_removed(removed)
        nodes.append(target)
        deleted.extend(removed)
    return _finish(g, Strategy.HDN, None, deleted, nodes, rec.trajectory)


def _cover_nodes(state: IncrementalCore) -> list[int]:
    """Greedy set cover of the corona by node removals.

    Removing x breaks corona membership of x itself (if in the corona) and
    of every corona neighbour of x. Scores are recomputed after each pick.
    """
    uncovered = set(state.corona())
    covers: dict[int, set[int]] = {}
    for c in uncovered:
        covers.setdefault(c, set()).add(c)
        for x in state.core_neighbors(c):
            covers.setdefault(x, set()).add(c)
    picks = []
    while uncovered:
        x = min(covers, key=lambda y: (-len(covers[y] & uncovered), y))
        picks.append(x)
        uncovered -= covers.pop(x)
    return picks


def ckc_attack(g: Graph) -> AttackResult:
    I, state = _original_core(g)
    rec = TrajectoryRecorder(g, I)
    deleted: list[Edge] = []
    nodes: list[int] = []
    while not state.empty:
        for x in _cover_nodes(state):
            removed, _ = state.remove_node(x)
            if removed:
                rec.node_removed(removed)
            nodes.append(x)
            deleted.extend(removed)
    return _finish(g, Strategy.CKC, None, deleted, nodes, rec.trajectory)


def budget_estimate(E_I_size: int, d: int) -> AttackBudgetEstimate:
    if d < 0 or d > E_I_size:
        raise ValueError(f"need 0 <= d <= |E_I|, got d={d}, |E_I|={E_I_size}")
    return AttackBudgetEstimate(d, sum(math.comb(E_I_size, i) for i in range(1, d + 1)))


MAX_EXHAUSTIVE_EDGES = 20
MAX_EXHAUSTIVE_DEPTH = 4


def _survives(core_adj: dict[int, set[int]], k: int, removed: tuple[Edge, ...]) -> bool:
    deg = {v: len(a) for v, a in core_adj.items()}
    cut = set(removed)
    for u, v in removed:
        deg[u] -= 1
        deg[v] -= 1
    alive = set(core_adj)
    stack = [v for v in alive if deg[v] < k]
    alive.difference_update(stack)
    while stack:
        x = stack.pop()
        for y in core_adj[x]:
            if y in alive and canonical(x, y) not in cut:
                deg[y] -= 1
                if deg[y] < k:
                    alive.discard(y)
                    stack.append(y)
    return bool(alive)


def exhaustive_min_attack(g: Graph, d_max: int = MAX_EXHAUSTIVE_DEPTH) -> AttackResult:
    """Smallest edge set that empties the innermost core, by brute force.

    Only meant for tiny inputs; refuses anything beyond the size guards.
    """
    I, state = _original_core(g)
    core_edges = state.core_edges()
    if len(core_edges) > MAX_EXHAUSTIVE_EDGES:
        raise SearchBoundError(
            f"|E_I| = {len(core_edges)} exceeds {MAX_EXHAUSTIVE_EDGES}; "
            f"{budget_estimate(len(core_edges), min(d_max, len(core_edges))).combination_count} combinations"
        )
    if d_max > MAX_EXHAUSTIVE_DEPTH:
        raise SearchBoundError(f"d_max = {d_max} exceeds {MAX_EXHAUSTIVE_DEPTH}")
    core_adj = {v: set(state.core_neighbors(v)) for v in state.core_nodes()}
    for d in range(1, min(d_max, len(core_edges)) + 1):
        for combo in combinations(core_edges, d):
            if not _survives(core_adj, I, combo):
                rec = TrajectoryRecorder(g, I)
                for u, v in combo:
                    rec.edge_deleted(u, v)
                return _finish(g, Strategy.EXHAUSTIVE, None, list(combo), [], rec.trajectory)
    raise SearchBoundError(f"no collapsing edge set of size <= {d_max}")


_RANDOMIZED: dict[Strategy, Callable[[Graph, int], AttackResult]] = {
    Strategy.RED: red_attack,
    Strategy.COREATTACK: core_attack,
    Strategy.GREEDY: greedy_core_attack,
}
_DETERMINISTIC: dict[Strategy, Callable[[Graph], AttackResult]] = {
    Strategy.HDE: hde_attack,
    Strategy.HDN: hdn_attack,
    Strategy.CKC: ckc_attack,
}


def run_attack(g: Graph, strategy: Strategy | str, seed: int | None = None) -> AttackResult:
    strategy = Strategy(strategy)
    if strategy in _RANDOMIZED:
        if seed is None:
            raise ValueError(f"{strategy.value} needs a seed")
        return _RANDOMIZED[strategy](g, seed)
    if strategy is Strategy.EXHAUSTIVE:
        return exhaustive_min_attack(g)
    return _DETERMINISTIC[strategy](g)
