"""Core percolation on random graphs: ER generation, deletion sweeps and the Q fixed point."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
from scipy.stats import poisson

from .graph_core import Edge, Graph, IncrementalCore, NoCoreError, core_decompose
from .metrics import QTrajectory, Sample


class ConvergenceError(RuntimeError):
    def __init__(self, last: float, residual: float, iterations: int):
        super().__init__(
            f"fixed point not reached after {iterations} iterations "
            f"(last Q={last!r}, residual={residual:.3e})"
        )
        self.last = last
        self.residual = residual
        self.iterations = iterations


def _unrank_pairs(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map k -> (i, j) with i < j, enumerating pairs by increasing j then i."""
    j = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    tri = j * (j - 1) // 2
    over = tri > idx
    j[over] -= 1
    tri = j * (j - 1) // 2
    under = tri + j <= idx
    j[under] += 1
    tri = j * (j - 1) // 2
    return idx - tri, j


def er_graph(n: int, m: int, seed: int) -> Graph:
    """Uniform random simple graph with exactly ``n`` nodes and ``m`` edges."""
    capacity = n * (n - 1) // 2
    if m < 0 or m > capacity:
        raise ValueError(f"m={m} outside [0, {capacity}] for n={n}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(capacity, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    i, j = _unrank_pairs(np.asarray(idx, dtype=np.int64))
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in zip(i.tolist(), j.tolist()):
        adj[a].add(b)
        adj[b].add(a)
    return Graph(range(n), adj)


@dataclass(frozen=True)
class DegreeDistribution:
    pmf: tuple[float, ...]

    def __post_init__(self):
        if abs(math.fsum(self.pmf) - 1.0) > 1e-12:
            raise ValueError("pmf does not sum to 1")

    @classmethod
    def poisson(cls, mean: float, tail: float = 1e-10) -> DegreeDistribution:
        i_max = int(poisson.isf(tail, mean)) + 1
        while poisson.sf(i_max, mean) >= tail:
            i_max += 1
        p = poisson.pmf(np.arange(i_max + 1), mean)
        return cls(tuple((p / p.sum()).tolist()))

    @classmethod
    def from_graph(cls, g: Graph) -> DegreeDistribution:
        counts = np.bincount([g.degree(v) for v in range(len(g))])
        return cls(tuple((counts / counts.sum()).tolist()))

    @property
    def i_max(self) -> int:
        return len(self.pmf) - 1

    @property
    def z1(self) -> float:
        return math.fsum(i * p for i, p in enumerate(self.pmf))

    def P(self, i: int) -> float:
        return self.pmf[i] if 0 <= i < len(self.pmf) else 0.0


@dataclass(frozen=True)
class PercolationConfig:
    k: int
    L: int
    total_edges: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.total_edges <= 0 or not 0 <= self.L <= self.total_edges:
            raise ValueError(f"need 0 <= L <= |E| with |E| > 0, got L={self.L}, |E|={self.total_edges}")

    @classmethod
    def from_fraction(cls, k: int, deleted_fraction: float, total_edges: int) -> PercolationConfig:
        return cls(k, int(round(deleted_fraction * total_edges)), total_edges)

    @property
    def p(self) -> float:
        return 1.0 - self.L / self.total_edges


def q_kernel(
    dist: DegreeDistribution, cfg: PercolationConfig, i: int, l: int, deleted_branch: bool
) -> float:
    """Branch weight of reaching a degree-``i`` node with ``l`` of its edges deleted.

    With ``deleted_branch`` false the arrival edge survives and ``l`` of the
    other ``i - 1`` are gone; with it true the arrival edge is one of the
    ``l`` deleted edges.
    """
    if i < 1 or l < 0 or l > i:
        raise ValueError(f"invalid (i, l) = ({i}, {l})")
    p, q = cfg.p, 1.0 - cfg.p
    lead = i * dist.P(i) / dist.z1
    if deleted_branch:
        if l == 0:
            return 0.0
        return lead * math.comb(i - 1, l - 1) * q**l * p ** (i - l)
    if l > i - 1:
        return 0.0
    return lead * math.comb(i - 1, l) * q**l * p ** (i - l)


def _fixed_point_terms(dist: DegreeDistribution, cfg: PercolationConfig):
    """Coefficients c, exponents a (on Q) and b (on 1-Q) of the self-consistency map."""
    c, a, b = [], [], []
    k, L = cfg.k, cfg.L
    for i in range(dist.i_max):
        for l in range(min(L, i) + 1):
            w = q_kernel(dist, cfg, i + 1, l, False)
            if w:
                for n in range(min(k - 2, i - l) + 1):
                    c.append(w * math.comb(i - l, n))
                    a.append(i - n - l)
                    b.append(n)
        for l in range(min(L - 1, i) + 1):
            w = q_kernel(dist, cfg, i + 1, l + 1, True)
            if w:
                for n in range(min(k - 1, i - l) + 1):
                    c.append(w * math.comb(i - l, n))
                    a.append(i - n - l)
                    b.append(n)
    return np.array(c), np.array(a, dtype=float), np.array(b, dtype=float)


@dataclass(frozen=True)
class FixedPoint:
    k: int
    L: int
    p: float
    q: float
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "L": self.L,
            "p": self.p,
            "q": self.q,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def q_fixed_point(
    dist: DegreeDistribution,
    cfg: PercolationConfig,
    damping: float = 0.5,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> FixedPoint:
    """Damped iteration of the Q self-consistency map from Q = 0.

    Starting at 0 lands on the smallest fixed point, i.e. the branch on
    which a core still exists whenever it does.
    """
    c, a, b = _fixed_point_terms(dist, cfg)

    def F(x: float) -> float:
        if not len(c):
            return 0.0
        return float(np.sum(c * np.power(x, a) * np.power(1.0 - x, b)))

    Q = 0.0
    residual = abs(F(Q) - Q)
    for it in range(1, max_iter + 1):
        Q = min(1.0, max(0.0, (1.0 - damping) * Q + damping * F(Q)))
        residual = abs(F(Q) - Q)
        if residual <= tol:
            return FixedPoint(cfg.k, cfg.L, cfg.p, Q, it, residual)
    raise ConvergenceError(Q, residual, max_iter)


def k_core_outside_fraction(g: Graph, k: int) -> float:
    """Share of edge endpoints whose node is not in the k-core (1.0 if there is none)."""
    if g.edge_count == 0:
        return 1.0
    return IncrementalCore.from_graph(g, k).outside_endpoint_fraction()


def simulate_q(
    n: int, mean_degree: float, k: int, deleted_fraction: float, runs: int, seed: int
) -> list[float]:
    """Monte-Carlo Q: random edge deletions on ER graphs, endpoint fraction outside the k-core."""
    m = int(round(n * mean_degree / 2))
    L = int(round(deleted_fraction * m))
    out = []
    seeds = np.random.SeedSequence(seed).spawn(runs)
    for ss in seeds:
        gseed, dseed = (int(x) for x in ss.generate_state(2))
        g = er_graph(n, m, gseed)
        state = IncrementalCore.from_graph(g, k)
        edges = list(g.edges())
        rng = np.random.default_rng(dseed)
        for idx in rng.choice(len(edges), size=L, replace=False).tolist():
            state.delete_edge(*edges[idx])
        out.append(state.outside_endpoint_fraction())
    return out


class SweepMode(str, enum.Enum):
    CASE_I = "case_i"
    CASE_II = "case_ii"
    UNIFORM = "uniform"


@dataclass
class Sweep:
    mode: SweepMode
    trajectory: QTrajectory
    collapsed: bool
    exhausted: bool
    deleted: list[Edge] = field(default_factory=list, repr=False)

    @property
    def collapse_nde(self) -> int | None:
        return self.trajectory.final.nde if self.collapsed else None

    def largest_jump(self) -> tuple[int, float]:
        """(round index, increase in Q) of the biggest single-round rise."""
        qs = [s.q for s in self.trajectory]
        best = (0, 0.0)
        for r in range(1, len(qs)):
            if qs[r] - qs[r - 1] > best[1]:
                best = (r, qs[r] - qs[r - 1])
        return best

    def pre_jump_max_change(self) -> float:
        r, _ = self.largest_jump()
        qs = [s.q for s in self.trajectory][:r]
        return max((abs(y - x) for x, y in zip(qs, qs[1:])), default=0.0)

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "mode", "cum_nde", "q_empirical", "core_size", "q_node_fraction"])
        for r, s in enumerate(self.trajectory):
            writer.writerow([r, self.mode.value, s.nde, f"{s.q:.10g}", s.core_size, f"{s.q_node:.10g}"])


def _eligible(state: IncrementalCore, mode: SweepMode) -> list[Edge]:
    if mode is SweepMode.UNIFORM:
        return state.core_edges()
    on_corona = set(state.corona())
    if mode is SweepMode.CASE_II:
        found = set()
        for c in on_corona:
            for u in state.core_neighbors(c):
                found.add((c, u) if c < u else (u, c))
        return sorted(found)
    return [(u, v) for u, v in state.core_edges() if u not in on_corona and v not in on_corona]


def deletion_sweep(g: Graph, mode: SweepMode | str, step: int, seed: int) -> Sweep:
    """Delete ``step`` eligible innermost-core edges per round until the core is gone.

    Eligibility is judged against the corona at the start of each round.
    The trajectory starts with the untouched graph at zero deletions.
    """
    mode = SweepMode(mode)
    if step < 1:
        raise ValueError("step must be positive")
    if g.edge_count == 0:
        raise NoCoreError("no core structure: graph has no edges")
    I = core_decompose(g).k_max
    state = IncrementalCore.from_graph(g, I)
    n = len(g)
    rng = np.random.default_rng(seed)
    traj = QTrajectory()
    deleted: list[Edge] = []

    def sample():
        size = len(state)
        traj.samples.append(
            Sample(len(deleted), state.outside_endpoint_fraction(), size, 1.0 if size == 0 else 1.0 - size / n)
        )

    sample()
    exhausted = False
    while not state.empty:
        pool = _eligible(state, mode)
        if not pool:
            exhausted = True
            break
        take = min(step, len(pool))
        for idx in sorted(rng.choice(len(pool), size=take, replace=False).tolist()):
            e = pool[idx]
            state.delete_edge(*e)
            deleted.append(e)
        sample()
    return Sweep(mode, traj, state.empty, exhausted, deleted)


@dataclass(frozen=True)
class PairedOutcome:
    seed: int
    case_ii_nde: int | None
    uniform_nde: int | None
    jump: float
    pre_jump_change: float

    @property
    def earlier_collapse(self) -> bool:
        return (
            self.case_ii_nde is not None
            and self.uniform_nde is not None
            and self.case_ii_nde < self.uniform_nde
        )

    @property
    def discontinuous(self) -> bool:
        return self.jump > 0.5 and self.pre_jump_change < 0.05


def paired_comparison(n: int, m: int, seeds: Sequence[int], step: int) -> list[PairedOutcome]:
    """Case (ii) against uniform deletion on the same ER instance for each seed."""
    rows = []
    for s in seeds:
        g = er_graph(n, m, s)
        c2 = deletion_sweep(g, SweepMode.CASE_II, step, s)
        un = deletion_sweep(g, SweepMode.UNIFORM, step, s)
        rows.append(
            PairedOutcome(s, c2.collapse_nde, un.collapse_nde, c2.largest_jump()[1], c2.pre_jump_max_change())
        )
    return rows
