from __future__ import annotations

import os
import random
from pathlib import Path

import pytest

from corebreak.graph_core import Graph, load_edge_list

ROOT = Path(__file__).resolve().parents[1]
DATA_ENV = {
    "dolphin": ("COREBREAK_DOLPHIN", ROOT / "data" / "dolphins.txt"),
    "us_power": ("COREBREAK_US_POWER", ROOT / "data" / "us_power.txt"),
}


def dataset_path(name: str) -> Path:
    env, default = DATA_ENV[name]
    return Path(os.environ.get(env, default))


@pytest.fixture(scope="session")
def dolphin() -> Graph:
    path = dataset_path("dolphin")
    if not path.exists():
        pytest.fail(
            f"Dolphin edge list not found at {path}; set COREBREAK_DOLPHIN or place the "
            "62-node / 159-edge public network there (see README)",
            pytrace=False,
        )
    return load_edge_list(path)


# ---- independent oracles: plain dict/set code, no shared helpers with the package ----


def brute_k_core(n: int, edges, k: int) -> set[int]:
    """Repeatedly drop any node with fewer than k live neighbours until nothing changes."""
    nbrs = {v: set() for v in range(n)}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    alive = set(range(n))
    changed = True
    while changed:
        changed = False
        for v in list(alive):
            if len(nbrs[v] & alive) < k:
                alive.remove(v)
                changed = True
    return alive


def brute_core_numbers(n: int, edges) -> list[int]:
    cores = [0] * n
    k = 1
    while True:
        alive = brute_k_core(n, edges, k)
        if not alive:
            return cores
        for v in alive:
            cores[v] = k
        k += 1


def gnp_edges(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def gnp(n: int, p: float, seed: int) -> Graph:
    return Graph.from_edges(gnp_edges(n, p, random.Random(seed)), n=n)


def complete(n: int) -> Graph:
    return Graph.from_edges(((u, v) for u in range(n) for v in range(u + 1, n)), n=n)


def star(leaves: int) -> Graph:
    return Graph.from_edges(((0, i) for i in range(1, leaves + 1)), n=leaves + 1)


def random_graphs(count: int, max_nodes: int, seed: int, min_nodes: int = 2):
    """Deterministic stream of G(n, p) graphs with varied size and density."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(min_nodes, max_nodes)
        p = rng.uniform(0.05, 0.5)
        yield Graph.from_edges(gnp_edges(n, p, rng), n=n)


# ---- acceptance summary: one line per criterion ----

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _CRITERIA.items():
        tag = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"[{tag}] {name}")
