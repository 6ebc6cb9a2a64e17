"""Undirected simple graphs, edge-list ingestion and k-core structure.

Nodes carry an external label (whatever the input file used) and a dense
internal id ``0..n-1``. Every edge is stored once in canonical form
``(min_id, max_id)``.
"""

from __future__ import annotations

import csv
import io
import os
from collections import deque
from dataclasses import dataclass
from typing import IO, Hashable, Iterable, Iterator, Sequence

Edge = tuple[int, int]


class ParseError(ValueError):
    """Raised for an edge-list line that does not hold exactly two tokens."""

    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected 2 tokens, got {line!r}")
        self.lineno = lineno
        self.line = line


class NoCoreError(ValueError):
    pass


def canonical(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected simple graph.

    ``adjacency[v]`` is a frozenset of internal ids. Labels default to the
    internal ids themselves.
    """

    __slots__ = ("_labels", "_adj", "_index", "_m")

    def __init__(self, labels: Sequence[Hashable], adjacency: Sequence[Iterable[int]]):
        if len(labels) != len(adjacency):
            raise ValueError("labels and adjacency differ in length")
        self._labels = tuple(labels)
        self._adj = tuple(frozenset(a) for a in adjacency)
        self._index: dict[Hashable, int] | None = None
        total = 0
        for v, nbrs in enumerate(self._adj):
            if v in nbrs:
                raise ValueError(f"self-loop at node {v}")
            for u in nbrs:
                if v not in self._adj[u]:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")
            total += len(nbrs)
        self._m = total // 2

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        n: int | None = None,
        labels: Sequence[Hashable] | None = None,
    ) -> Graph:
        """Build from internal-id pairs; self-loops and duplicates are dropped."""
        edges = list(edges)
        if n is None:
            n = len(labels) if labels is not None else 1 + max((max(e) for e in edges), default=-1)
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return cls(labels if labels is not None else range(n), adj)

    @classmethod
    def empty(cls) -> Graph:
        return cls((), ())

    def __len__(self) -> int:
        return len(self._adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._labels == other._labels and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._labels, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={len(self)}, m={self._m})"

    @property
    def node_labels(self) -> tuple[Hashable, ...]:
        return self._labels

    @property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return self._adj

    @property
    def edge_count(self) -> int:
        return self._m

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < len(self._adj) and v in self._adj[u]

    def edges(self) -> Iterator[Edge]:
        """Canonical edges in increasing lexicographic order."""
        for u, nbrs in enumerate(self._adj):
            for v in sorted(nbrs):
                if u < v:
                    yield (u, v)

    def index_of(self, label: Hashable) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self._labels)}
        return self._index[label]

    def label_edge(self, e: Edge) -> tuple[Hashable, Hashable]:
        return (self._labels[e[0]], self._labels[e[1]])

    def mutable_adjacency(self) -> list[set[int]]:
        """Fresh mutable copy of the adjacency, for algorithms that own a working graph."""
        return [set(a) for a in self._adj]


def load_edge_list(
    source: str | os.PathLike | IO[bytes] | IO[str],
    comment_prefix: str | tuple[str, ...] = ("#", "%"),
    separator: str | None = None,
) -> Graph:
    """Read a whitespace (or ``separator``) delimited edge list.

    Labels keep their textual form; ids follow first appearance. Self-loops
    are dropped and repeated edges, in either direction, collapse to one.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load_edge_list(fh, comment_prefix, separator)
    if isinstance(comment_prefix, str):
        comment_prefix = (comment_prefix,)

    stream = source
    if not isinstance(source, io.TextIOBase):
        stream = io.TextIOWrapper(source, encoding="utf-8")  # type: ignore[arg-type]

    index: dict[str, int] = {}
    labels: list[str] = []
    adj: list[set[int]] = []

    def node(tok: str) -> int:
        i = index.get(tok)
        if i is None:
            i = index[tok] = len(labels)
            labels.append(tok)
            adj.append(set())
        return i

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith(comment_prefix):
            continue
        parts = line.split(separator)
        if separator is not None:
            parts = [p.strip() for p in parts if p.strip()]
        if len(parts) != 2:
            raise ParseError(lineno, line)
        u, v = node(parts[0]), node(parts[1])
        if u != v:
            adj[u].add(v)
            adj[v].add(u)

    if stream is not source:
        stream.detach()  # type: ignore[union-attr]
    return Graph(labels, adj)


@dataclass(frozen=True)
class CoreDecomposition:
    core_number: tuple[int, ...]
    k_max: int

    def shell(self, k: int) -> list[int]:
        return [v for v, c in enumerate(self.core_number) if c == k]

    def core_nodes(self, k: int) -> list[int]:
        return [v for v, c in enumerate(self.core_number) if c >= k]


def core_numbers(adj: Sequence[Iterable[int]]) -> list[int]:
    """Bucket peeling in O(n + m) over a plain adjacency sequence."""
    n = len(adj)
    if n == 0:
        return []
    deg = [len(a) for a in adj]
    md = max(deg)
    bin_start = [0] * (md + 1)
    for d in deg:
        bin_start[d] += 1
    start = 0
    for d in range(md + 1):
        count = bin_start[d]
        bin_start[d] = start
        start += count
    pos = [0] * n
    vert = [0] * n
    for v in range(n):
        pos[v] = bin_start[deg[v]]
        vert[pos[v]] = v
        bin_start[deg[v]] += 1
    for d in range(md, 0, -1):
        bin_start[d] = bin_start[d - 1]
    bin_start[0] = 0

    for i in range(n):
        v = vert[i]
        dv = deg[v]
        for u in adj[v]:
            du = deg[u]
            if du > dv:
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u], pos[w] = pw, pu
                    vert[pu], vert[pw] = w, u
                bin_start[du] += 1
                deg[u] = du - 1
    return deg


def core_decompose(g: Graph) -> CoreDecomposition:
    cores = core_numbers(g.adjacency)
    return CoreDecomposition(tuple(cores), max(cores, default=0))


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    """Subgraph on ``nodes`` (kept in increasing id order), relabelled densely."""
    keep = sorted(set(nodes))
    remap = {v: i for i, v in enumerate(keep)}
    adj = [[remap[u] for u in g.adjacency[v] if u in remap] for v in keep]
    return Graph([g.node_labels[v] for v in keep], adj)


def k_core_subgraph(g: Graph, k: int, decomp: CoreDecomposition | None = None) -> Graph:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return g
    decomp = decomp or core_decompose(g)
    return induced_subgraph(g, decomp.core_nodes(k))


def innermost_core(g: Graph) -> tuple[int, Graph]:
    if g.edge_count == 0:
        raise NoCoreError("no core structure: graph has no edges")
    decomp = core_decompose(g)
    return decomp.k_max, k_core_subgraph(g, decomp.k_max, decomp)


@dataclass(frozen=True)
class CoronaSet:
    nodes: frozenset[int]
    component_partition: tuple[frozenset[int], ...]


def corona(core: Graph, I: int) -> CoronaSet:
    """Nodes of an I-core with exactly I neighbours, split into connected pieces."""
    members = frozenset(v for v in range(len(core)) if core.degree(v) == I)
    parts = []
    seen: set[int] = set()
    for s in sorted(members):
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        seen.add(s)
        while queue:
            x = queue.popleft()
            for y in core.adjacency[x]:
                if y in members and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        parts.append(frozenset(comp))
    return CoronaSet(members, tuple(parts))


def delete_edges(g: Graph, edges: Iterable[tuple[int, int]]) -> Graph:
    """Remove the given edges; the node set is untouched."""
    doomed = set()
    for u, v in edges:
        if not g.has_edge(u, v):
            raise KeyError(f"({u}, {v}) is not an edge")
        doomed.add(canonical(u, v))
    if not doomed:
        return g
    adj = g.mutable_adjacency()
    for u, v in doomed:
        adj[u].discard(v)
        adj[v].discard(u)
    return Graph(g.node_labels, adj)


def neighbor_closure(v: int, g: Graph) -> Graph:
    if not 0 <= v < len(g):
        raise KeyError(f"unknown node id {v}")
    return induced_subgraph(g, {v} | g.adjacency[v])


def write_core_numbers(g: Graph, decomp: CoreDecomposition, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["node_label", "core_number"])
    for label, c in zip(g.node_labels, decomp.core_number):
        writer.writerow([label, c])


class IncrementalCore:
    """Mutable working graph that keeps its k-core up to date under deletions.

    Deleting an edge or a node only ever shrinks the k-core, so the core is
    maintained by a localized cascade from the touched endpoints. The object
    also tracks the endpoint mass of core nodes so the fraction of edge
    endpoints lying outside the core is available in O(1).
    """

    def __init__(self, adj: Sequence[Iterable[int]], k: int):
        self.k = k
        self.adj: list[set[int]] = [set(a) for a in adj]
        n = len(self.adj)
        self.in_core = [True] * n
        self.core_deg = [len(a) for a in self.adj]
        self.total_edges = sum(self.core_deg) // 2
        self.size = n
        self._core_endpoints = sum(self.core_deg)
        queue = [v for v in range(n) if self.core_deg[v] < k]
        for v in queue:
            self.in_core[v] = False
        self.size -= len(queue)
        self._cascade(queue)

    @classmethod
    def from_graph(cls, g: Graph, k: int) -> IncrementalCore:
        return cls(g.adjacency, k)

    def _expel(self, queue: list[int]) -> list[int]:
        expelled = list(queue)
        for v in queue:
            self.in_core[v] = False
        self.size -= len(queue)
        self._cascade(queue, expelled)
        return expelled

    def _cascade(self, queue: list[int], sink: list[int] | None = None) -> None:
        in_core, core_deg, adj, k = self.in_core, self.core_deg, self.adj, self.k
        while queue:
            x = queue.pop()
            self._core_endpoints -= len(adj[x])
            for y in adj[x]:
                if in_core[y]:
                    core_deg[y] -= 1
                    if core_deg[y] < k:
                        in_core[y] = False
                        self.size -= 1
                        queue.append(y)
                        if sink is not None:
                            sink.append(y)
        # core_deg of expelled nodes is stale from here on; only members are read

    def __len__(self) -> int:
        return self.size

    @property
    def empty(self) -> bool:
        return self.size == 0

    def delete_edge(self, u: int, v: int) -> list[int]:
        """Delete edge (u, v) from the working graph; return nodes expelled from the core."""
        if v not in self.adj[u]:
            raise KeyError(f"({u}, {v}) is not an edge")
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.total_edges -= 1
        queue = []
        if self.in_core[u] and self.in_core[v]:
            for x in (u, v):
                self.core_deg[x] -= 1
                self._core_endpoints -= 1
                if self.core_deg[x] < self.k:
                    queue.append(x)
        else:
            # exactly the core endpoint's full degree drops
            self._core_endpoints -= self.in_core[u] + self.in_core[v]
        return self._expel(queue) if queue else []

    def remove_node(self, v: int) -> tuple[list[Edge], list[int]]:
        """Delete every edge at ``v``; the node stays as an isolated vertex."""
        removed = [canonical(v, u) for u in sorted(self.adj[v])]
        expelled: list[int] = []
        for a, b in removed:
            expelled.extend(self.delete_edge(a, b))
        return removed, expelled

    def gainers(self, u: int, v: int) -> set[int]:
        """Nodes that would leave the core if (u, v) were deleted. Read-only."""
        if not (self.in_core[u] and self.in_core[v] and v in self.adj[u]):
            raise KeyError(f"({u}, {v}) is not an edge of the {self.k}-core")
        k, adj, in_core = self.k, self.adj, self.in_core
        deg = {u: self.core_deg[u] - 1, v: self.core_deg[v] - 1}
        gone: set[int] = set()
        stack = []
        for x in (u, v):
            if deg[x] < k:
                gone.add(x)
                stack.append(x)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not in_core[y] or y in gone:
                    continue
                if (x == u and y == v) or (x == v and y == u):
                    continue
                d = deg.get(y, self.core_deg[y]) - 1
                deg[y] = d
                if d < k:
                    gone.add(y)
                    stack.append(y)
        return gone

    def core_nodes(self) -> list[int]:
        return [v for v, c in enumerate(self.in_core) if c]

    def core_neighbors(self, v: int) -> list[int]:
        return sorted(u for u in self.adj[v] if self.in_core[u])

    def core_degree(self, v: int) -> int:
        return self.core_deg[v] if self.in_core[v] else 0

    def core_edges(self) -> list[Edge]:
        in_core = self.in_core
        return [
            (u, w)
            for u in range(len(self.adj))
            if in_core[u]
            for w in sorted(self.adj[u])
            if u < w and in_core[w]
        ]

    def corona(self) -> list[int]:
        """Core members whose in-core degree is exactly k, in id order."""
        k = self.k
        return [v for v, c in enumerate(self.in_core) if c and self.core_deg[v] == k]

    def outside_endpoint_fraction(self) -> float:
        """Share of edge endpoints of the working graph not in the core; 1.0 once it is empty."""
        if self.size == 0 or self.total_edges == 0:
            return 1.0
        return 1.0 - self._core_endpoints / (2 * self.total_edges)

    def to_graph(self, labels: Sequence[Hashable] | None = None) -> Graph:
        return Graph(labels if labels is not None else range(len(self.adj)), self.adj)
