"""Attack cost and precision measures, plus the Q-index trajectory recorder."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import IO, Iterable, NamedTuple

from .graph_core import CoreDecomposition, Graph, IncrementalCore, NoCoreError, core_decompose


class NotDeletionOnlyError(ValueError):
    pass


def percent(x: Fraction, places: int = 4) -> str:
    """Exact fraction rendered as a percentage, half-even at ``places`` decimals."""
    with localcontext() as ctx:
        ctx.prec = 50
        value = Decimal(x.numerator * 100) / Decimal(x.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class MetricsReport:
    ndn: int
    nde: int
    ecr: Fraction
    far: Fraction
    i_original: int
    v_i_size: int

    @property
    def ecr_pct(self) -> str:
        return percent(self.ecr)

    @property
    def far_pct(self) -> str:
        return percent(self.far)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ecr"] = float(self.ecr)
        d["far"] = float(self.far)
        d["ecr_exact"] = f"{self.ecr.numerator}/{self.ecr.denominator}"
        d["far_exact"] = f"{self.far.numerator}/{self.far.denominator}"
        d["ecr_pct"] = self.ecr_pct
        d["far_pct"] = self.far_pct
        return d

    def csv_row(self, network: str, strategy: str) -> list:
        return [network, strategy, self.ndn, self.nde, self.ecr_pct, self.far_pct]


METRICS_HEADER = ["network", "strategy", "ndn", "nde", "ecr_pct", "far_pct"]


def compute_metrics(
    original: Graph,
    original_decomp: CoreDecomposition,
    attacked: Graph,
    deleted_nodes: Iterable[int] = (),
) -> MetricsReport:
    """NDN, NDE, ECR and FAR of ``attacked`` relative to ``original``.

    NDN counts the nodes the attack deleted on purpose, which the caller
    passes in; isolation alone does not make a node deleted.
    """
    if len(attacked) != len(original):
        raise NotDeletionOnlyError("not a deletion-only derivative: node sets differ")
    nde = 0
    for v in range(len(original)):
        extra = attacked.adjacency[v] - original.adjacency[v]
        if extra:
            u = min(extra)
            raise NotDeletionOnlyError(
                f"not a deletion-only derivative: edge ({v}, {u}) absent from original"
            )
        nde += len(original.adjacency[v]) - len(attacked.adjacency[v])
    nde //= 2

    I = original_decomp.k_max
    after = core_decompose(attacked).core_number
    outside = [v for v, c in enumerate(original_decomp.core_number) if c < I]
    changed = sum(1 for v in outside if after[v] != original_decomp.core_number[v])
    far = Fraction(changed, len(outside)) if outside else Fraction(0)
    ecr = Fraction(nde, original.edge_count) if original.edge_count else Fraction(0)
    return MetricsReport(
        ndn=len(set(deleted_nodes)),
        nde=nde,
        ecr=ecr,
        far=far,
        i_original=I,
        v_i_size=len(original) - len(outside),
    )


def empirical_q(g: Graph, i_original: int) -> float:
    """Fraction of edge endpoints of ``g`` outside its innermost core.

    Each edge contributes both endpoints. Once the degeneracy has dropped
    below ``i_original`` the core counts as gone and the value is 1.
    """
    if g.edge_count == 0:
        raise NoCoreError("Q is undefined on an edgeless graph")
    return IncrementalCore.from_graph(g, i_original).outside_endpoint_fraction()


class Sample(NamedTuple):
    nde: int
    q: float
    core_size: int
    q_node: float


@dataclass
class QTrajectory:
    samples: list[Sample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def final(self) -> Sample | None:
        return self.samples[-1] if self.samples else None

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "nde", "q_empirical", "core_size", "q_node_fraction"])
        for step, s in enumerate(self.samples, start=1):
            writer.writerow([step, s.nde, f"{s.q:.10g}", s.core_size, f"{s.q_node:.10g}"])


class TrajectoryRecorder:
    """Replays deletions on a private copy of the graph and samples Q after each step."""

    def __init__(self, g: Graph, i_original: int):
        self._core = IncrementalCore.from_graph(g, i_original)
        self._n = len(g)
        self._nde = 0
        self.trajectory = QTrajectory()

    def edge_deleted(self, u: int, v: int, *, sample: bool = True) -> None:
        self._core.delete_edge(u, v)
        self._nde += 1
        if sample:
            self.sample()

    def node_removed(self, edges: Iterable[tuple[int, int]]) -> None:
        for u, v in edges:
            self.edge_deleted(u, v, sample=False)
        self.sample()

    def sample(self) -> None:
        samples = self.trajectory.samples
        if samples and samples[-1].nde == self._nde:
            return
        size = len(self._core)
        q_node = 1.0 if size == 0 else 1.0 - size / self._n
        samples.append(Sample(self._nde, self._core.outside_endpoint_fraction(), size, q_node))


def record_trajectory(g: Graph, i_original: int, steps: Iterable[Iterable[tuple[int, int]]]) -> QTrajectory:
    """One sample per step, where a step is the batch of edges one deletion removed."""
    rec = TrajectoryRecorder(g, i_original)
    for edges in steps:
        rec.node_removed(edges)
    return rec.trajectory
