from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import nx_graph
from d2dmot.analysis import (
    UNREACHABLE,
    ChannelDependencyGraph,
    all_pairs_metrics,
    bfs_distances,
    bfs_shortest_path,
    build_cdg,
    find_cycle,
    is_deadlock_free,
    midline_cut,
    min_bisection_bruteforce,
    verify_bisection,
)
from d2dmot.errors import RoutingIncomplete
from d2dmot.routing import make_router
from d2dmot.topology import Link, LinkKind, build_topology, from_edges


@st.composite
def random_graphs(draw, max_nodes=12):
    n = draw(st.integers(1, max_nodes))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    adj = [sorted({v for u2, v in edges if u2 == u and v != u}) for u in range(n)]
    return adj


@given(random_graphs(), st.data())
def test_bfs_matches_networkx(adj, data):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(adj)))
    g.add_edges_from((u, v) for u, row in enumerate(adj) for v in row)
    src = data.draw(st.integers(0, len(adj) - 1))
    expected = nx.single_source_shortest_path_length(g, src)
    dist = bfs_distances(adj, src)
    for v in range(len(adj)):
        assert dist[v] == expected.get(v, UNREACHABLE)


@given(random_graphs(), st.data())
def test_shortest_path_is_valid_and_minimal(adj, data):
    n = len(adj)
    s, t = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    result = bfs_shortest_path(adj, s, t)
    dist = bfs_distances(adj, s)[t]
    if dist == UNREACHABLE:
        assert not result.reachable and result.path == ()
        return
    assert result.distance == dist == len(result.path) - 1
    assert result.path[0] == s and result.path[-1] == t
    assert all(b in adj[a] for a, b in zip(result.path, result.path[1:]))


def test_self_path():
    assert bfs_shortest_path([[1], [0]], 1, 1).format() == "1"


def test_tie_break_prefers_highest_predecessor():
    # 0 -> {1, 2} -> 3
    adj = [[1, 2], [3], [3], []]
    assert bfs_shortest_path(adj, 0, 3).path == (0, 2, 3)


def test_out_of_range():
    with pytest.raises(IndexError):
        bfs_shortest_path([[]], 0, 3)


@pytest.mark.parametrize("family, size", [
    ("mesh", (3, 5)), ("torus", (4, 4)), ("d2dmesh", (5, 5)), ("mot", (4, 4)), ("d2dmot", (4, 4)), ("bintree", 8),
])
def test_metrics_match_networkx(family, size):
    t = build_topology(family, size)
    g = nx_graph(t)
    lengths = dict(nx.all_pairs_shortest_path_length(g))
    m = all_pairs_metrics(t)
    assert m.diameter == nx.diameter(g)
    n = t.num_nodes
    assert m.avg_hops == Fraction(sum(sum(d.values()) for d in lengths.values()), n * (n - 1))
    ends = t.endpoints()
    me = all_pairs_metrics(t, ends)
    assert me.diameter == max(lengths[a][b] for a in ends for b in ends)


def test_endpoint_diameter_d2dmot():
    t = build_topology("d2dmot", (4, 4))
    assert all_pairs_metrics(t, t.endpoints()).diameter == 7
    assert all_pairs_metrics(t).diameter == 8


def test_single_node_metrics():
    m = all_pairs_metrics([[]])
    assert m.diameter == 0 and m.avg_hops == 0


@pytest.mark.parametrize("m, n", [(2, 2), (3, 3), (4, 4), (2, 5), (4, 6)])
def test_mesh_midline_is_bisection(m, n):
    t = build_topology("mesh", (m, n))
    cut = midline_cut(t)
    assert len(cut) == m
    if n % 2 == 0:
        assert verify_bisection(t, cut).is_bisection


def test_bisection_rejects_unbalanced_and_foreign_links():
    t = build_topology("mesh", (2, 2))
    assert not verify_bisection(t, []).is_bisection
    with pytest.raises(ValueError):
        verify_bisection(t, [Link(0, 3, LinkKind.PLAIN)])


@pytest.mark.parametrize("size, width", [((2, 2), 2), ((3, 3), 4), ((3, 4), 3), ((2, 6), 2)])
def test_min_bisection_bruteforce_mesh(size, width):
    assert min_bisection_bruteforce(build_topology("mesh", size)) == width


def test_min_bisection_bruteforce_vs_networkx_kernighan_lin_upper_bound():
    t = build_topology("torus", (3, 4))
    g = nx_graph(t)
    a, b = nx.algorithms.community.kernighan_lin_bisection(g, seed=1)
    assert min_bisection_bruteforce(t) <= nx.cut_size(g, a, b)
    assert min_bisection_bruteforce(t) == 6


def test_min_bisection_limit():
    with pytest.raises(ValueError):
        min_bisection_bruteforce(build_topology("mesh", (4, 4)))


def test_midline_rejects_trees():
    with pytest.raises(ValueError):
        midline_cut(build_topology("mot", (2, 2)))


def test_cdg_trivial_cases():
    assert is_deadlock_free(ChannelDependencyGraph((), frozenset()))
    a, b = (0, 1), (1, 0)
    two_cycle = ChannelDependencyGraph((a, b), frozenset({(a, b), (b, a)}))
    assert not is_deadlock_free(two_cycle)
    assert set(find_cycle(two_cycle)) == {a, b}


@given(random_graphs(max_nodes=8))
def test_find_cycle_matches_networkx(adj):
    verts = tuple((u, 0) for u in range(len(adj)))
    edges = frozenset(((u, 0), (v, 0)) for u, row in enumerate(adj) for v in row)
    cdg = ChannelDependencyGraph(verts, edges)
    g = nx.DiGraph(list(edges))
    g.add_nodes_from(verts)
    cycle = find_cycle(cdg)
    assert (cycle is None) == nx.is_directed_acyclic_graph(g)
    if cycle:
        ring = cycle + cycle[:1]
        assert all((x, y) in edges for x, y in zip(ring, ring[1:]))


@pytest.mark.parametrize("family, size, router", [
    ("mesh", (3, 3), "xy"), ("mesh", (4, 4), "xy"), ("mot", (4, 4), "mot"), ("d2dmot", (4, 4), "d2dmot"),
])
def test_cdg_acyclic(family, size, router):
    t = build_topology(family, size)
    assert is_deadlock_free(build_cdg(t, make_router(router, t)))


def test_cdg_torus_positive_wrap_cyclic():
    t = build_topology("torus", (3, 3))
    assert not is_deadlock_free(build_cdg(t, make_router("torus-positive", t)))


def test_cdg_torus_shortest_wrap():
    small = build_topology("torus", (3, 3))
    assert is_deadlock_free(build_cdg(small, make_router("torus-shortest", small)))
    big = build_topology("torus", (5, 5))
    assert not is_deadlock_free(build_cdg(big, make_router("torus-shortest", big)))


def test_cdg_propagates_routing_failure():
    class Stuck:
        topology = from_edges(3, [(0, 1), (1, 2)])

        def destinations(self):
            return [0, 2]

        def next_hop(self, curr, dest, core_id=0, state=None):
            return None

    with pytest.raises(RoutingIncomplete):
        build_cdg(Stuck.topology, Stuck())


@settings(max_examples=10, deadline=None)
@given(st.integers(3, 7))
def test_cdg_vertices_are_all_channels(n):
    t = build_topology("mesh", (n, n))
    cdg = build_cdg(t, make_router("xy", t))
    assert len(cdg.vertices) == 2 * t.num_links
    assert all(c1[1] == c2[0] for c1, c2 in cdg.edges)


@pytest.mark.parametrize("n", range(3, 9))
def test_d2dmesh_diameter_below_mesh(n):
    d2d = all_pairs_metrics(build_topology("d2dmesh", (n, n))).diameter
    assert d2d < all_pairs_metrics(build_topology("mesh", (n, n))).diameter
    assert d2d == n - 1


def _leaf_diameter(family, n):
    t = build_topology(family, (n, n))
    return all_pairs_metrics(t, t.endpoints()).diameter


@pytest.mark.parametrize("n", [2, 4])
def test_d2dmot_diameter_below_mot(n):
    assert _leaf_diameter("d2dmot", n) < _leaf_diameter("mot", n)


@pytest.mark.xfail(strict=True, reason="at 8x8 both networks have leaf diameter 12")
def test_d2dmot_diameter_below_mot_8x8():
    assert _leaf_diameter("d2dmot", 8) < _leaf_diameter("mot", 8)
