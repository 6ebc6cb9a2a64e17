import io
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corebreak.graph_core import (
    Graph,
    IncrementalCore,
    NoCoreError,
    ParseError,
    core_decompose,
    corona,
    delete_edges,
    induced_subgraph,
    innermost_core,
    k_core_subgraph,
    load_edge_list,
    neighbor_closure,
    write_core_numbers,
)

from .conftest import brute_core_numbers, brute_k_core, complete, gnp, gnp_edges, random_graphs, star


@st.composite
def graphs(draw, max_nodes=18):
    n = draw(st.integers(1, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=n * 4))
    return Graph.from_edges(edges, n=n)


# ---- ingestion ----


def test_load_dedupes_and_drops_self_loops():
    g = load_edge_list(io.BytesIO(b"a b\nb a\na a\n"))
    assert len(g) == 2
    assert g.edge_count == 1
    assert g.node_labels == ("a", "b")


def test_load_skips_comments_and_blank_lines():
    data = b"# snap header\n% konect header\n\n1 2\n2 3\n"
    g = load_edge_list(io.BytesIO(data))
    assert (len(g), g.edge_count) == (3, 2)


def test_load_custom_separator_and_text_stream():
    g = load_edge_list(io.StringIO("x,y\ny , z\n"), separator=",")
    assert g.node_labels == ("x", "y", "z")
    assert g.edge_count == 2


def test_load_reports_line_number():
    with pytest.raises(ParseError) as info:
        load_edge_list(io.BytesIO(b"1 2\n# fine\n1 2 3\n"))
    assert info.value.lineno == 3
    assert "line 3" in str(info.value)


def test_load_empty_input_is_empty_graph():
    g = load_edge_list(io.BytesIO(b""))
    assert len(g) == 0 and g.edge_count == 0


def test_load_from_path(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("1\t2\n2\t3\n3\t1\n")
    g = load_edge_list(p)
    assert g.edge_count == 3
    assert g.index_of("3") == 2


def test_load_random_file_with_duplicates_counts_distinct_pairs():
    rng = random.Random(7)
    lines = []
    for _ in range(950):
        lines.append((rng.randrange(200), rng.randrange(200)))
    lines += [lines[rng.randrange(len(lines))][::-1] for _ in range(50)]
    rng.shuffle(lines)
    text = "\n".join(f"{u} {v}" for u, v in lines)
    distinct = {frozenset((u, v)) for u, v in lines if u != v}
    g = load_edge_list(io.BytesIO(text.encode()))
    assert g.edge_count == len(distinct)


# ---- graph invariants ----


def test_graph_rejects_asymmetric_and_self_loops():
    with pytest.raises(ValueError):
        Graph([0, 1], [{1}, set()])
    with pytest.raises(ValueError):
        Graph([0], [{0}])


@given(graphs())
def test_graph_invariants(g):
    assert g.edge_count * 2 == sum(len(a) for a in g.adjacency)
    for v, nbrs in enumerate(g.adjacency):
        assert v not in nbrs
        assert all(v in g.adjacency[u] for u in nbrs)
    assert list(g.edges()) == sorted(g.edges())
    assert all(u < v for u, v in g.edges())


# ---- core decomposition ----


def test_triangle_cores():
    d = core_decompose(complete(3))
    assert d.core_number == (2, 2, 2) and d.k_max == 2


def test_star_cores():
    d = core_decompose(star(5))
    assert set(d.core_number) == {1}


def test_empty_graph_decomposition():
    d = core_decompose(Graph.empty())
    assert d.core_number == () and d.k_max == 0


def test_isolated_nodes_core_zero():
    g = Graph.from_edges([(0, 1)], n=4)
    assert core_decompose(g).core_number == (1, 1, 0, 0)


def test_core_decompose_matches_oracle_on_random_graphs():
    for g in random_graphs(100, 50, seed=11):
        assert list(core_decompose(g).core_number) == brute_core_numbers(len(g), list(g.edges()))


@given(graphs())
def test_core_decompose_matches_oracle_property(g):
    d = core_decompose(g)
    assert list(d.core_number) == brute_core_numbers(len(g), list(g.edges()))
    assert all(c <= g.degree(v) for v, c in enumerate(d.core_number))


@given(graphs(), st.data())
def test_core_numbers_monotone_under_edge_deletion(g, data):
    edges = list(g.edges())
    if not edges:
        return
    e = data.draw(st.sampled_from(edges))
    before = core_decompose(g).core_number
    after = core_decompose(delete_edges(g, [e])).core_number
    assert all(a <= b for a, b in zip(after, before))


@given(graphs())
def test_cores_nest(g):
    d = core_decompose(g)
    for k in range(d.k_max + 1):
        assert set(d.core_nodes(k + 1)) <= set(d.core_nodes(k))


@given(graphs())
def test_k_core_members_have_k_neighbours_inside(g):
    d = core_decompose(g)
    for k in range(1, d.k_max + 1):
        sub = k_core_subgraph(g, k, d)
        assert all(sub.degree(v) >= k for v in range(len(sub)))


def test_membership_equivalence_random():
    """v is in the k-core iff at least k of its neighbours are in the k-core."""
    for g in random_graphs(60, 50, seed=5):
        d = core_decompose(g)
        for k in range(0, d.k_max + 2):
            members = set(d.core_nodes(k))
            for v in range(len(g)):
                assert (v in members) == (len(g.adjacency[v] & members) >= k)


# ---- k-core subgraph, innermost core, corona ----


def test_k_core_of_k5_is_itself():
    k5 = complete(5)
    sub = k_core_subgraph(k5, 4)
    assert (len(sub), sub.edge_count) == (5, 10)


def test_k_core_above_kmax_is_empty():
    assert len(k_core_subgraph(complete(4), 4)) == 0


def test_k_core_zero_is_whole_graph():
    g = Graph.from_edges([(0, 1)], n=3)
    assert k_core_subgraph(g, 0) is g


def test_k_core_negative_rejected():
    with pytest.raises(ValueError):
        k_core_subgraph(complete(3), -1)


def test_k_core_matches_pruning_oracle():
    g = gnp(30, 0.2, seed=3)
    sub = k_core_subgraph(g, 3)
    expected = brute_k_core(30, list(g.edges()), 3)
    assert set(sub.node_labels) == expected
    expected_edges = {(u, v) for u, v in g.edges() if u in expected and v in expected}
    assert {tuple(sorted(sub.label_edge(e))) for e in sub.edges()} == expected_edges


def test_innermost_core_k5():
    I, core = innermost_core(complete(5))
    assert I == 4 and len(core) == 5 and core.edge_count == 10


def test_innermost_core_edgeless_raises():
    with pytest.raises(NoCoreError, match="no core structure"):
        innermost_core(Graph.from_edges([], n=3))


def test_small_innermost_core_is_a_clique():
    for g in random_graphs(200, 14, seed=21):
        if g.edge_count == 0:
            continue
        I, core = innermost_core(g)
        if len(core) == I + 1:
            assert core.edge_count == I * (I + 1) // 2


def test_corona_k5():
    c = corona(complete(5), 4)
    assert c.nodes == frozenset(range(5))
    assert c.component_partition == (frozenset(range(5)),)


def test_corona_k5_plus_attached_node():
    # node 5 touches clique nodes 0..3; node 4 is the clique node it misses
    edges = [(u, v) for u in range(5) for v in range(u + 1, 5)] + [(5, i) for i in range(4)]
    g = Graph.from_edges(edges, n=6)
    I, core = innermost_core(g)
    assert I == 4
    c = corona(core, I)
    assert {core.node_labels[v] for v in c.nodes} == {4, 5}
    assert len(c.component_partition) == 2


def test_corona_matches_degree_filter_and_partitions():
    for g in random_graphs(40, 40, seed=9):
        if g.edge_count == 0:
            continue
        I, core = innermost_core(g)
        c = corona(core, I)
        assert c.nodes == {v for v in range(len(core)) if core.degree(v) == I}
        assert c.nodes, "corona of the innermost core is never empty"
        union = set()
        for part in c.component_partition:
            assert not (union & part)
            union |= part
            # connected inside the corona
            start = min(part)
            seen, stack = {start}, [start]
            while stack:
                x = stack.pop()
                for y in core.adjacency[x] & part:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            assert seen == part
        assert union == c.nodes


# ---- edits and closures ----


def test_delete_edge_from_triangle():
    p = delete_edges(complete(3), [(0, 2)])
    assert sorted(p.edges()) == [(0, 1), (1, 2)]


def test_delete_nothing_is_identity():
    g = complete(4)
    assert delete_edges(g, []) == g


def test_delete_all_edges_keeps_nodes():
    k5 = complete(5)
    bare = delete_edges(k5, list(k5.edges()))
    assert len(bare) == 5 and bare.edge_count == 0


def test_delete_non_edge_names_pair():
    with pytest.raises(KeyError, match=r"\(1, 2\)"):
        delete_edges(star(3), [(0, 3), (1, 2)])


def test_neighbor_closure_star():
    s = star(5)
    assert neighbor_closure(0, s) == s
    leaf = neighbor_closure(3, s)
    assert len(leaf) == 2 and leaf.edge_count == 1


def test_neighbor_closure_matches_induced_oracle():
    g = gnp(20, 0.3, seed=4)
    for v in range(20):
        sub = neighbor_closure(v, g)
        nodes = {v} | set(g.adjacency[v])
        want = {(a, b) for a, b in g.edges() if a in nodes and b in nodes}
        got = {tuple(sorted(sub.label_edge(e))) for e in sub.edges()}
        assert set(sub.node_labels) == nodes and got == want


def test_neighbor_closure_unknown_node():
    with pytest.raises(KeyError):
        neighbor_closure(9, star(2))


def test_induced_subgraph_preserves_labels():
    g = load_edge_list(io.BytesIO(b"a b\nb c\nc d\n"))
    sub = induced_subgraph(g, [1, 2])
    assert sub.node_labels == ("b", "c") and sub.edge_count == 1


def test_write_core_numbers_csv():
    g = load_edge_list(io.BytesIO(b"a b\nb c\nc a\nc d\n"))
    buf = io.StringIO()
    write_core_numbers(g, core_decompose(g), buf)
    assert buf.getvalue() == "node_label,core_number\na,2\nb,2\nc,2\nd,1\n"


# ---- incremental core maintenance ----


def test_incremental_core_tracks_recomputation():
    rng = random.Random(2)
    for trial in range(30):
        n = rng.randint(5, 40)
        edges = gnp_edges(n, rng.uniform(0.1, 0.5), rng)
        if not edges:
            continue
        k = max(brute_core_numbers(n, edges))
        state = IncrementalCore(Graph.from_edges(edges, n=n).adjacency, k)
        live = list(edges)
        rng.shuffle(live)
        while live:
            u, v = live.pop()
            state.delete_edge(u, v)
            assert set(state.core_nodes()) == brute_k_core(n, live, k)
            core = brute_k_core(n, live, k)
            if core and live:
                outside = sum((a not in core) + (b not in core) for a, b in live)
                assert state.outside_endpoint_fraction() == pytest.approx(outside / (2 * len(live)))
            else:
                assert state.outside_endpoint_fraction() == 1.0


def test_incremental_remove_node_keeps_isolated_vertex():
    state = IncrementalCore(complete(5).adjacency, 4)
    removed, expelled = state.remove_node(2)
    assert removed == [(0, 2), (1, 2), (2, 3), (2, 4)]
    assert set(expelled) == set(range(5))
    assert len(state.adj) == 5 and not state.adj[2]
