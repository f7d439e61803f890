"""Graph-search oracles and structural verifiers.

Graphs are plain adjacency sequences (``adj[u]`` lists the successors of
``u``); a :class:`~d2dmot.topology.Topology` is accepted anywhere a graph is.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import Disconnected, RoutingIncomplete
from .topology import Family, Link, Topology

UNREACHABLE = -1

Channel = tuple[int, int]


def _adj(graph) -> Sequence[Sequence[int]]:
    return graph.adjacency if isinstance(graph, Topology) else graph


@dataclass(frozen=True)
class PathResult:
    path: tuple[int, ...]
    distance: int | None

    @property
    def reachable(self) -> bool:
        return self.distance is not None

    def format(self) -> str:
        return " => ".join(str(v) for v in self.path)


def bfs_distances(graph, src: int) -> list[int]:
    """Hop distance from ``src`` to every node (``UNREACHABLE`` where none)."""
    adj = _adj(graph)
    dist = [UNREACHABLE] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def bfs_shortest_path(graph, src: int, dst: int) -> PathResult:
    """Minimum-hop path from ``src`` to ``dst``.

    Among equal-length paths the one whose predecessor at each step has the
    highest id is returned, which is what a label-correcting search that lets
    the last equal relaxation win produces. An unreachable pair gives a result
    with an empty path and ``distance=None``.
    """
    adj = _adj(graph)
    n = len(adj)
    if not (0 <= src < n and 0 <= dst < n):
        raise IndexError(f"node ids must be in [0, {n}), got {src} and {dst}")
    dist = bfs_distances(adj, src)
    if dist[dst] == UNREACHABLE:
        return PathResult((), None)
    preds: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            preds[v].append(u)
    path = [dst]
    v = dst
    while v != src:
        v = max(u for u in preds[v] if dist[u] == dist[v] - 1)
        path.append(v)
    path.reverse()
    return PathResult(tuple(path), dist[dst])


def all_pairs_distances(graph) -> list[list[int]]:
    adj = _adj(graph)
    return [bfs_distances(adj, s) for s in range(len(adj))]


@dataclass(frozen=True)
class Metrics:
    diameter: int
    avg_hops: Fraction
    eccentricity: dict[int, int]


def all_pairs_metrics(graph, nodes: Iterable[int] | None = None) -> Metrics:
    """Diameter, mean hop count over ordered distinct pairs, and eccentricities.

    ``nodes`` restricts both ends of every pair (e.g. to IP-hosting routers);
    by default all routers are used.
    """
    adj = _adj(graph)
    nodes = list(range(len(adj))) if nodes is None else sorted(nodes)
    ecc = {}
    total = 0
    pairs = 0
    for s in nodes:
        dist = bfs_distances(adj, s)
        worst = 0
        for t in nodes:
            if t == s:
                continue
            d = dist[t]
            if d == UNREACHABLE:
                raise Disconnected(f"node {t} unreachable from {s}")
            total += d
            pairs += 1
            worst = max(worst, d)
        ecc[s] = worst
    return Metrics(
        diameter=max(ecc.values(), default=0),
        avg_hops=Fraction(total, pairs) if pairs else Fraction(0),
        eccentricity=ecc,
    )


# -- bisection ---------------------------------------------------------------


@dataclass(frozen=True)
class BisectionResult:
    is_bisection: bool
    halves: tuple[int, int]
    components: int


def _components(num_nodes: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(num_nodes)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * num_nodes
    comps = []
    for s in range(num_nodes):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(comp)
    return comps


def verify_bisection(topology: Topology, cut: Iterable[Link | tuple[int, int]]) -> BisectionResult:
    """Whether removing ``cut`` leaves exactly two components of sizes differing by at most one."""
    removed = {(min(l.a, l.b), max(l.a, l.b)) if isinstance(l, Link) else (min(l), max(l)) for l in cut}
    unknown = removed - {l.pair for l in topology.links}
    if unknown:
        raise ValueError(f"cut contains links not in the topology: {sorted(unknown)}")
    comps = _components(topology.num_nodes, (l.pair for l in topology.links if l.pair not in removed))
    sizes = sorted((len(c) for c in comps), reverse=True)
    if len(comps) != 2:
        halves = (sizes[0], topology.num_nodes - sizes[0])
        return BisectionResult(False, halves, len(comps))
    return BisectionResult(sizes[0] - sizes[1] <= 1, (sizes[0], sizes[1]), 2)


def midline_cut(topology: Topology) -> list[Link]:
    """Links crossing the vertical midline of a mesh or torus (wraparounds included)."""
    if topology.family not in (Family.MESH, Family.TORUS, Family.D2DMESH):
        raise ValueError("midline cut is defined for grid families only")
    half = topology.cols // 2
    left = {n.id for n in topology.nodes if n.address.y < half}
    return [l for l in topology.links if (l.a in left) != (l.b in left)]


def min_bisection_bruteforce(topology: Topology, limit: int = 12) -> int:
    """Exact minimum bisection width by enumerating balanced partitions."""
    n = topology.num_nodes
    if n > limit:
        raise ValueError(f"brute-force bisection is limited to {limit} nodes, got {n}")
    pairs = [l.pair for l in topology.links]
    best = None
    # node 0 is pinned to one side; that side holds either half of an odd count
    for side_size in sorted({n // 2, n - n // 2}):
        for rest in itertools.combinations(range(1, n), side_size - 1):
            side = {0, *rest}
            width = sum((a in side) != (b in side) for a, b in pairs)
            if best is None or width < best:
                best = width
    return best if best is not None else 0


# -- channel dependency graph -------------------------------------------------


@dataclass(frozen=True)
class ChannelDependencyGraph:
    vertices: tuple[Channel, ...]
    edges: frozenset[tuple[Channel, Channel]]


def build_cdg(topology: Topology, routing, endpoints: Iterable[int] | None = None) -> ChannelDependencyGraph:
    """Dependencies induced by routing every ordered endpoint pair."""
    from .routing import route_trace

    nodes = list(routing.destinations() if endpoints is None else endpoints)
    vertices = []
    for link in topology.links:
        vertices += [(link.a, link.b), (link.b, link.a)]
    edges = set()
    for s in nodes:
        for d in nodes:
            if s == d:
                continue
            result = route_trace(routing, s, d, topology)
            if not result.reachable:
                raise RoutingIncomplete(f"no route from {s} to {d}")
            path = result.path
            channels = list(zip(path, path[1:]))
            edges.update(zip(channels, channels[1:]))
    return ChannelDependencyGraph(tuple(sorted(vertices)), frozenset(edges))


def find_cycle(cdg: ChannelDependencyGraph) -> list[Channel] | None:
    """One directed cycle of the CDG, or ``None`` when it is acyclic."""
    succ: dict[Channel, list[Channel]] = {c: [] for c in cdg.vertices}
    for c1, c2 in sorted(cdg.edges):
        succ.setdefault(c1, []).append(c2)
        succ.setdefault(c2, [])
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(succ, WHITE)
    for root in sorted(succ):
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(succ[root]))]
        colour[root] = GREY
        trail = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = BLACK
                stack.pop()
                trail.pop()
            elif colour[nxt] == GREY:
                return trail[trail.index(nxt):]
            elif colour[nxt] == WHITE:
                colour[nxt] = GREY
                stack.append((nxt, iter(succ[nxt])))
                trail.append(nxt)
    return None


def is_deadlock_free(cdg: ChannelDependencyGraph) -> bool:
    return find_cycle(cdg) is None
