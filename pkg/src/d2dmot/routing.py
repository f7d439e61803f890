"""Deterministic next-hop routing functions and routing validators.

A routing function maps ``(current router, destination router)`` to the next
router, or to :class:`Deliver` once the packet sits at its destination. The
destination core id only matters at delivery time. Every function here is
oblivious: the optional ``state`` argument exists for signature compatibility
with adaptive schemes and is ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .addressing import MoTAddress, XYAddress
from .analysis import PathResult, all_pairs_distances
from .errors import AddressMismatch, Disconnected, LivelockDetected, RoutingIncomplete
from .topology import Family, LinkKind, Orientation, Role, Topology, log2_exact

__all__ = [
    "Deliver",
    "Direction",
    "RoutingFunction",
    "XYRouting",
    "TorusXYRouting",
    "ExtendedXYRouting",
    "MoTRouting",
    "D2DMoTRouting",
    "TableRouting",
    "build_table_router",
    "make_router",
    "mot_next_hop",
    "route_trace",
    "validate_routing",
    "xy_next_hop",
    "StretchReport",
    "PairStretch",
]


@dataclass(frozen=True)
class Deliver:
    """Eject at the current router to core ``core`` (0 is Core1, 1 is Core2)."""

    core: int = 0


class Direction(str, enum.Enum):
    NORTH = "north"  # decreasing row
    SOUTH = "south"
    EAST = "east"  # increasing column
    WEST = "west"
    DELIVER = "deliver"


_STEP = {
    Direction.NORTH: (-1, 0),
    Direction.SOUTH: (1, 0),
    Direction.EAST: (0, 1),
    Direction.WEST: (0, -1),
}


def xy_next_hop(curr: XYAddress, dest: XYAddress) -> Direction:
    """Dimension-order step: correct the row (X) first, then the column (Y)."""
    if curr.x < dest.x:
        return Direction.SOUTH
    if curr.x > dest.x:
        return Direction.NORTH
    if curr.y < dest.y:
        return Direction.EAST
    if curr.y > dest.y:
        return Direction.WEST
    return Direction.DELIVER


def mot_next_hop(curr: MoTAddress, dest: MoTAddress, row_bits: int, col_bits: int) -> MoTAddress | Deliver:
    """One step of mesh-of-tree routing, in address space.

    Column tree first: climb until the node's row prefix covers the
    destination row, then descend toward it. At the leaf, the same is done in
    the row tree for the column. A row-tree node outside the destination row
    is never reached from a leaf source; it descends toward the destination
    column so that the function stays total.
    """
    row, col = dest.rn, dest.cn
    if not curr.covers_row(row, row_bits):
        if curr.rl < col_bits:
            return MoTAddress(curr.rn, curr.cl, (col >> (col_bits - curr.rl - 1)), curr.rl + 1)
        return MoTAddress(curr.rn >> 1, curr.cl - 1, curr.cn, curr.rl)
    if curr.cl != row_bits:
        return MoTAddress(row >> (row_bits - curr.cl - 1), curr.cl + 1, curr.cn, curr.rl)
    if not curr.covers_col(col, col_bits):
        return MoTAddress(curr.rn, curr.cl, curr.cn >> 1, curr.rl - 1)
    if curr.rl != col_bits:
        return MoTAddress(curr.rn, curr.cl, col >> (col_bits - curr.rl - 1), curr.rl + 1)
    return Deliver(dest.core_id)


class RoutingFunction:
    """Base class; subclasses implement :meth:`next_hop`."""

    name = "routing"

    def __init__(self, topology: Topology):
        self.topology = topology

    def next_hop(self, curr: int, dest: int, core_id: int = 0, state=None) -> int | Deliver:
        raise NotImplementedError

    __call__ = next_hop

    def destinations(self) -> list[int]:
        """Routers this function accepts as destinations."""
        return self.topology.endpoints()

    def __repr__(self):
        t = self.topology
        return f"{type(self).__name__}({t.family.value}{t.size})"


class _GridRouting(RoutingFunction):
    def __init__(self, topology: Topology):
        super().__init__(topology)
        if not all(isinstance(n.address, XYAddress) for n in topology.nodes):
            raise AddressMismatch(f"{self.name} routing needs XY-addressed switches")

    def _xy(self, node: int) -> XYAddress:
        return self.topology.nodes[node].address

    def _step(self, curr: int, direction: Direction) -> int:
        a = self._xy(curr)
        dx, dy = _STEP[direction]
        nxt = self.topology.node_at(XYAddress(a.x + dx, a.y + dy))
        if nxt is None:
            raise RoutingIncomplete(f"step {direction.value} leaves the grid at {a}")
        return nxt


class XYRouting(_GridRouting):
    name = "xy"

    def next_hop(self, curr, dest, core_id=0, state=None):
        direction = xy_next_hop(self._xy(curr), self._xy(dest))
        if direction is Direction.DELIVER:
            return Deliver(core_id)
        return self._step(curr, direction)


class TorusXYRouting(_GridRouting):
    """Dimension-order routing over torus rings.

    ``mode="shortest"`` moves the short way round each ring (ties go in the
    increasing direction); ``mode="positive"`` always moves in the increasing
    direction and relies on the wraparound link to close the ring.
    """

    name = "torus-xy"

    def __init__(self, topology: Topology, mode: str = "shortest"):
        super().__init__(topology)
        if mode not in ("shortest", "positive"):
            raise ValueError(f"unknown torus routing mode {mode!r}")
        self.mode = mode

    def _ring_step(self, here: int, there: int, size: int) -> int:
        delta = (there - here) % size
        if self.mode == "positive" or delta <= size - delta:
            return 1
        return -1

    def next_hop(self, curr, dest, core_id=0, state=None):
        a, b = self._xy(curr), self._xy(dest)
        rows, cols = self.topology.size
        if a.x != b.x:
            target = XYAddress((a.x + self._ring_step(a.x, b.x, rows)) % rows, a.y)
        elif a.y != b.y:
            target = XYAddress(a.x, (a.y + self._ring_step(a.y, b.y, cols)) % cols)
        else:
            return Deliver(core_id)
        return self.topology.node_at(target)


class ExtendedXYRouting(_GridRouting):
    """XY routing extended with the diameter channels of a diametrical mesh.

    With offsets ``dx, dy`` to the destination and threshold ``d`` (the mesh
    dimension, column count by default): plain XY is used when the packet
    shares a row or column with the destination or ``|dx| + |dy| <= d - 1``.
    Otherwise a diameter channel at the current switch is taken if its far end
    is strictly closer (BFS) to the destination; failing that the packet walks
    by XY toward the nearest switch owning such a channel.
    """

    name = "extxy"

    def __init__(self, topology: Topology, threshold: int | None = None):
        super().__init__(topology)
        self.threshold = topology.cols if threshold is None else threshold
        self.dist = all_pairs_distances(topology)
        owners: dict[int, list[int]] = {}
        for link in topology.links_of_kind(LinkKind.DIAMETER_CHANNEL):
            owners.setdefault(link.a, []).append(link.b)
            owners.setdefault(link.b, []).append(link.a)
        self.owners = {k: sorted(v) for k, v in sorted(owners.items())}

    def _useful_channel(self, node: int, dist_to_dest: list[int]) -> int | None:
        far = [z for z in self.owners.get(node, ()) if dist_to_dest[z] < dist_to_dest[node]]
        if not far:
            return None
        return min(far, key=lambda z: (dist_to_dest[z], z))

    def next_hop(self, curr, dest, core_id=0, state=None):
        a, b = self._xy(curr), self._xy(dest)
        dx, dy = b.x - a.x, b.y - a.y
        if dx == 0 and dy == 0:
            return Deliver(core_id)
        if dx == 0 or dy == 0 or abs(dx) + abs(dy) <= self.threshold - 1:
            return self._step(curr, xy_next_hop(a, b))

        dist_to_dest = self.dist[dest]
        here = self._useful_channel(curr, dist_to_dest)
        if here is not None:
            return here
        owners = [w for w in self.owners if self._useful_channel(w, dist_to_dest) is not None]
        if not owners:
            return self._step(curr, xy_next_hop(a, b))

        def manhattan(w):
            c = self._xy(w)
            return abs(c.x - a.x) + abs(c.y - a.y)

        target = min(owners, key=lambda w: (manhattan(w), w))
        return self._step(curr, xy_next_hop(a, self._xy(target)))


class _TreeRouting(RoutingFunction):
    def __init__(self, topology: Topology):
        super().__init__(topology)
        if topology.family not in (Family.MOT, Family.D2DMOT):
            raise AddressMismatch(f"{self.name} routing needs a mesh-of-tree topology")
        self.row_bits = log2_exact(topology.rows)
        self.col_bits = log2_exact(topology.cols)

    def _addr(self, node: int) -> MoTAddress:
        addr = self.topology.nodes[node].address
        if not isinstance(addr, MoTAddress):
            raise AddressMismatch(f"node {node} has no MoT address")
        return addr

    def _dest_addr(self, dest: int, core_id: int) -> MoTAddress:
        addr = self._addr(dest)
        if addr.cl != self.row_bits or addr.rl != self.col_bits:
            raise AddressMismatch(f"destination {dest} is not a leaf router")
        return addr.with_core(core_id)

    def _tree_step(self, curr: int, dest_addr: MoTAddress) -> int | Deliver:
        nxt = mot_next_hop(self._addr(curr), dest_addr, self.row_bits, self.col_bits)
        if isinstance(nxt, Deliver):
            return nxt
        node = self.topology.node_at(nxt)
        if node is None:
            raise AddressMismatch(f"address {nxt} not found in topology")
        return node


class MoTRouting(_TreeRouting):
    name = "mot"

    def next_hop(self, curr, dest, core_id=0, state=None):
        return self._tree_step(curr, self._dest_addr(dest, core_id))


class D2DMoTRouting(_TreeRouting):
    """Rule-based routing for the diametrical mesh-of-tree.

    Same row or same column: pure row-tree or column-tree routing. Otherwise
    the leaf diagonal is taken when it strictly cuts the grid (row + column)
    distance; if not, the row is fixed through the column tree, crossing the
    column-root shortcut when that strictly shortens the remaining BFS
    distance, and the column is then fixed through the row tree. Channel
    classes are used in the fixed order diagonal, column up, shortcut, column
    down, row up, row down, which keeps the dependency graph acyclic.
    """

    name = "d2dmot"

    def __init__(self, topology: Topology):
        super().__init__(topology)
        self.dist = all_pairs_distances(topology)
        self.diagonal: dict[int, int] = {}
        for link in topology.links_of_kind(LinkKind.DIAGONAL_MODULE):
            self.diagonal[link.a] = link.b
            self.diagonal[link.b] = link.a
        self.shortcut: dict[int, int] = {}
        for link in topology.links_of_kind(LinkKind.ROOT_SHORTCUT):
            ka, kb = topology.kind(link.a), topology.kind(link.b)
            if ka.orientation is Orientation.COL and kb.orientation is Orientation.COL:
                self.shortcut[link.a] = link.b
                self.shortcut[link.b] = link.a

    def next_hop(self, curr, dest, core_id=0, state=None):
        d = self._dest_addr(dest, core_id)
        a = self._addr(curr)
        kind = self.topology.kind(curr)
        if kind.role is Role.LEAF:
            if a.rn != d.rn and a.cn != d.cn and curr in self.diagonal:
                w = self.diagonal[curr]
                b = self._addr(w)
                if abs(b.rn - d.rn) + abs(b.cn - d.cn) < abs(a.rn - d.rn) + abs(a.cn - d.cn):
                    return w
        elif kind.role is Role.ROOT and kind.orientation is Orientation.COL and a.cn != d.cn:
            partner = self.shortcut.get(curr)
            if partner is not None and self.dist[partner][dest] < self.dist[curr][dest]:
                return partner
        return self._tree_step(curr, d)


class TableRouting(RoutingFunction):
    """All-pairs BFS next-hop table; the lowest-id neighbour wins ties."""

    name = "table"

    def __init__(self, topology: Topology):
        super().__init__(topology)
        self.dist = all_pairs_distances(topology)
        if any(d < 0 for row in self.dist for d in row):
            raise Disconnected("table routing needs a connected topology")
        adj = topology.adjacency
        n = topology.num_nodes
        self.table: list[list[int]] = [[-1] * n for _ in range(n)]
        for dest in range(n):
            to_dest = self.dist[dest]
            for u in range(n):
                if u != dest:
                    self.table[u][dest] = next(v for v in adj[u] if to_dest[v] == to_dest[u] - 1)

    @property
    def table_size(self) -> int:
        return sum(len(row) for row in self.table)

    def destinations(self) -> list[int]:
        return list(range(self.topology.num_nodes))

    def next_hop(self, curr, dest, core_id=0, state=None):
        if curr == dest:
            return Deliver(core_id)
        return self.table[curr][dest]


def build_table_router(topology: Topology) -> TableRouting:
    return TableRouting(topology)


ROUTERS = {
    "xy": XYRouting,
    "extxy": ExtendedXYRouting,
    "mot": MoTRouting,
    "d2dmot": D2DMoTRouting,
    "table": TableRouting,
    "torus-shortest": lambda t: TorusXYRouting(t, "shortest"),
    "torus-positive": lambda t: TorusXYRouting(t, "positive"),
}

DEFAULT_ROUTER = {
    Family.MESH: "xy",
    Family.TORUS: "table",
    Family.D2DMESH: "extxy",
    Family.BINARY_TREE: "table",
    Family.MOT: "mot",
    Family.D2DMOT: "d2dmot",
    Family.CUSTOM: "table",
}


def make_router(name: str | None, topology: Topology) -> RoutingFunction:
    name = name or DEFAULT_ROUTER[topology.family]
    try:
        factory = ROUTERS[name]
    except KeyError:
        raise ValueError(f"unknown routing {name!r}; choose from {sorted(ROUTERS)}") from None
    return factory(topology)


def route_trace(routing: RoutingFunction, src: int, dest: int, topology: Topology | None = None,
                core_id: int = 0) -> PathResult:
    """Follow next hops from ``src`` until delivery.

    More than ``topology.num_nodes`` hops is treated as livelock.
    """
    topology = topology or routing.topology
    bound = topology.num_nodes
    path = [src]
    u = src
    while True:
        nxt = routing.next_hop(u, dest, core_id)
        if isinstance(nxt, Deliver):
            if u != dest:
                raise RoutingIncomplete(f"delivered at {u} instead of {dest}")
            return PathResult(tuple(path), len(path) - 1)
        if nxt is None or not topology.has_link(u, nxt):
            raise RoutingIncomplete(f"no valid next hop from {u} toward {dest} (got {nxt})")
        path.append(nxt)
        u = nxt
        if len(path) - 1 > bound:
            raise LivelockDetected(f"route {src}->{dest} exceeded {bound} hops")


@dataclass(frozen=True)
class PairStretch:
    src: int
    dst: int
    routed_len: int
    bfs_len: int

    @property
    def stretch(self) -> Fraction:
        return Fraction(self.routed_len, self.bfs_len)


@dataclass(frozen=True)
class StretchReport:
    pairs: tuple[PairStretch, ...]
    failures: tuple[tuple[int, int, str], ...]

    @property
    def attempted(self) -> int:
        return len(self.pairs) + len(self.failures)

    @property
    def delivery_rate(self) -> float:
        return len(self.pairs) / self.attempted if self.attempted else 1.0

    @property
    def max_stretch(self) -> Fraction:
        return max((p.stretch for p in self.pairs), default=Fraction(1))

    @property
    def mean_stretch(self) -> Fraction:
        if not self.pairs:
            return Fraction(1)
        return sum((p.stretch for p in self.pairs), Fraction(0)) / len(self.pairs)

    def stretched(self) -> list[PairStretch]:
        """Pairs routed on a longer-than-shortest path."""
        return [p for p in self.pairs if p.routed_len > p.bfs_len]

    def summary(self) -> dict:
        return {
            "delivery_rate": self.delivery_rate,
            "max_stretch": float(self.max_stretch),
            "mean_stretch": float(self.mean_stretch),
            "pairs": self.attempted,
            "stretched_pairs": len(self.stretched()),
            "failures": len(self.failures),
        }


def validate_routing(routing: RoutingFunction, topology: Topology | None = None, nodes=None) -> StretchReport:
    """Trace every ordered pair of distinct destinations and compare with BFS."""
    topology = topology or routing.topology
    nodes = sorted(routing.destinations() if nodes is None else nodes)
    dist = all_pairs_distances(topology)
    pairs, failures = [], []
    for s in nodes:
        for d in nodes:
            if s == d:
                continue
            try:
                result = route_trace(routing, s, d, topology)
            except (RoutingIncomplete, LivelockDetected, AddressMismatch) as exc:
                failures.append((s, d, f"{type(exc).__name__}: {exc}"))
                continue
            pairs.append(PairStretch(s, d, result.distance, dist[s][d]))
    return StretchReport(tuple(pairs), tuple(failures))
