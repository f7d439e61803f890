"""Router-graph construction for the supported topology families.

Every builder is deterministic: identical arguments give identical node ids
and link order. Node ids are dense from 0. For the mesh-of-tree families the
order is leaves row-major, then row-tree internals by (row, level, position),
then column-tree internals by (column, level, position).
"""

from __future__ import annotations

import enum
import json
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property
from types import MappingProxyType

from .addressing import MoTAddress, XYAddress, address_from_dict
from .errors import AlreadyAttached, Disconnected, InvalidAugmentation, SizeUnsupported


class Family(str, enum.Enum):
    MESH = "mesh"
    TORUS = "torus"
    FOLDED_TORUS = "folded_torus"
    BINARY_TREE = "bintree"
    OCTAGON = "octagon"
    SPIN = "spin"
    BFT = "bft"
    MOT = "mot"
    D2DMESH = "d2dmesh"
    D2DMOT = "d2dmot"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value: Family | str) -> Family:
        if isinstance(value, Family):
            return value
        try:
            return cls(value.lower().replace("-", "_"))
        except ValueError:
            raise SizeUnsupported(f"unknown topology family {value!r}") from None


BUILDABLE = (Family.MESH, Family.TORUS, Family.BINARY_TREE, Family.MOT, Family.D2DMESH, Family.D2DMOT)
GRID_FAMILIES = (Family.MESH, Family.TORUS, Family.FOLDED_TORUS, Family.MOT, Family.D2DMESH, Family.D2DMOT)


class Role(str, enum.Enum):
    SWITCH = "switch"
    LEAF = "leaf"
    STEM = "stem"
    ROOT = "root"


class Orientation(str, enum.Enum):
    ROW = "row"
    COL = "col"


class Placement(str, enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


@dataclass(frozen=True)
class NodeKind:
    role: Role
    orientation: Orientation | None = None
    placement: Placement | None = None

    def __str__(self) -> str:
        parts = [self.role.value]
        if self.orientation is not None:
            parts.append(self.orientation.value)
        if self.placement is not None:
            parts.append(self.placement.value)
        return ":".join(parts)

    @classmethod
    def parse(cls, text: str) -> NodeKind:
        parts = text.split(":")
        role = Role(parts[0])
        orientation = Orientation(parts[1]) if len(parts) > 1 else None
        placement = Placement(parts[2]) if len(parts) > 2 else None
        return cls(role, orientation, placement)


SWITCH = NodeKind(Role.SWITCH)
LEAF = NodeKind(Role.LEAF)


class LinkKind(str, enum.Enum):
    TREE = "tree"
    MESH_GRID = "mesh_grid"
    WRAPAROUND = "wraparound"
    DIAGONAL_MODULE = "diagonal_module"
    ROOT_SHORTCUT = "root_shortcut"
    DIAMETER_CHANNEL = "diameter_channel"
    PLAIN = "plain"


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    address: XYAddress | MoTAddress | None = None


@dataclass(frozen=True)
class Link:
    a: int
    b: int
    kind: LinkKind

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidAugmentation(f"self-loop link on node {self.a}")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class BuildConfig:
    """Augmentation overrides; ``extra_links`` replaces the default extra-link set."""

    extra_links: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True, eq=False)
class Topology:
    family: Family
    size: tuple[int, ...]
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    ips: Mapping[int, int] = field(default_factory=lambda: MappingProxyType({}))

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_links(self) -> int:
        return len(self.links)

    @property
    def ip_count(self) -> int:
        return sum(self.ips.values())

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour tuples, indexed by node id."""
        adj: list[list[int]] = [[] for _ in self.nodes]
        for link in self.links:
            adj[link.a].append(link.b)
            adj[link.b].append(link.a)
        return tuple(tuple(sorted(n)) for n in adj)

    @cached_property
    def _link_index(self) -> dict[tuple[int, int], Link]:
        return {link.pair: link for link in self.links}

    @cached_property
    def _address_index(self) -> dict:
        return {node.address: node.id for node in self.nodes if node.address is not None}

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adjacency[node]

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def link_between(self, u: int, v: int) -> Link | None:
        return self._link_index.get((min(u, v), max(u, v)))

    def has_link(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._link_index

    def address(self, node: int):
        return self.nodes[node].address

    def node_at(self, address) -> int | None:
        """Node id for an address (a MoT core id is ignored)."""
        if isinstance(address, MoTAddress):
            address = address.node_key()
        return self._address_index.get(address)

    def kind(self, node: int) -> NodeKind:
        return self.nodes[node].kind

    def links_of_kind(self, kind: LinkKind) -> list[Link]:
        return [link for link in self.links if link.kind is kind]

    def endpoints(self) -> list[int]:
        """Routers that host IP cores (the default attachment set when none are attached)."""
        ips = self.ips if self.ips else ip_rule(self)
        return sorted(n for n, count in ips.items() if count > 0)

    def ip_list(self) -> list[tuple[int, int]]:
        """Every IP core as ``(router, core_index)`` in a fixed order."""
        return [(n, k) for n in sorted(self.ips) for k in range(self.ips[n])]

    @property
    def rows(self) -> int:
        return self.size[0]

    @property
    def cols(self) -> int:
        return self.size[-1]

    def to_dict(self) -> dict:
        params = {"rows": self.size[0], "cols": self.size[1]} if len(self.size) == 2 else {"n": self.size[0]}
        return {
            "family": self.family.value,
            "params": params,
            "nodes": [
                {
                    "id": n.id,
                    "kind": str(n.kind),
                    "address": None if n.address is None else n.address.to_dict(),
                }
                for n in self.nodes
            ],
            "links": [{"a": l.a, "b": l.b, "kind": l.kind.value} for l in self.links],
            "ips": {str(k): v for k, v in sorted(self.ips.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> Topology:
        params = data["params"]
        size = (params["rows"], params["cols"]) if "rows" in params else (params["n"],)
        nodes = tuple(
            Node(n["id"], NodeKind.parse(n["kind"]), address_from_dict(n.get("address")))
            for n in data["nodes"]
        )
        if [n.id for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be dense and ordered from 0")
        links = tuple(Link(l["a"], l["b"], LinkKind(l["kind"])) for l in data["links"])
        ips = MappingProxyType({int(k): int(v) for k, v in data.get("ips", {}).items()})
        topo = cls(Family.parse(data["family"]), size, nodes, links, ips)
        _check_links(topo)
        return topo

    @classmethod
    def from_json(cls, text: str) -> Topology:
        return cls.from_dict(json.loads(text))


def _check_links(topo: Topology) -> None:
    seen = set()
    for link in topo.links:
        if not (0 <= link.a < topo.num_nodes and 0 <= link.b < topo.num_nodes):
            raise InvalidAugmentation(f"link {link.pair} references a missing node")
        if link.pair in seen:
            raise InvalidAugmentation(f"duplicate link {link.pair}")
        seen.add(link.pair)


def is_connected(adjacency: Sequence[Sequence[int]]) -> bool:
    if not adjacency:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(adjacency)


def log2_exact(n: int, what: str = "size") -> int:
    if n < 1 or n & (n - 1):
        raise SizeUnsupported(f"{what} {n} is not a power of two")
    return n.bit_length() - 1


def normalize_size(family: Family, size) -> tuple[int, ...]:
    """``(M, N)`` for grid families, ``(N,)`` for the counted families."""
    if isinstance(size, int):
        size = (size, size) if family in GRID_FAMILIES else (size,)
    size = tuple(int(s) for s in size)
    if family in GRID_FAMILIES:
        if len(size) == 1:
            size = (size[0], size[0])
        if len(size) != 2:
            raise SizeUnsupported(f"{family.value} needs (rows, cols), got {size}")
    elif len(size) != 1:
        if len(size) == 2 and size[0] == size[1]:
            size = (size[0],)
        else:
            raise SizeUnsupported(f"{family.value} takes a single size, got {size}")
    return size


# -- builders ---------------------------------------------------------------


def _grid_nodes(rows: int, cols: int) -> list[Node]:
    return [Node(x * cols + y, SWITCH, XYAddress(x, y)) for x in range(rows) for y in range(cols)]


def _grid_links(rows: int, cols: int) -> list[Link]:
    links = []
    for x in range(rows):
        for y in range(cols):
            u = x * cols + y
            if y + 1 < cols:
                links.append(Link(u, u + 1, LinkKind.MESH_GRID))
            if x + 1 < rows:
                links.append(Link(u, u + cols, LinkKind.MESH_GRID))
    return links


def _build_mesh(rows, cols):
    return _grid_nodes(rows, cols), _grid_links(rows, cols)


def _build_torus(rows, cols):
    nodes, links = _build_mesh(rows, cols)
    # a 2-ring's wraparound would duplicate its only grid link
    if cols > 2:
        links += [Link(x * cols, x * cols + cols - 1, LinkKind.WRAPAROUND) for x in range(rows)]
    if rows > 2:
        links += [Link(y, (rows - 1) * cols + y, LinkKind.WRAPAROUND) for y in range(cols)]
    return nodes, links


def default_diameter_pairs(rows: int, cols: int) -> list[tuple[int, int]]:
    """The eight default diameter channels of a diametrical mesh, as node-id pairs."""

    def nid(x, y):
        return x * cols + y

    last_r, last_c = rows - 1, cols - 1
    mid_r, mid_c = rows // 2, cols // 2
    return [
        (nid(0, 0), nid(last_r, last_c)),
        (nid(0, last_c), nid(last_r, 0)),
        (nid(0, 0), nid(0, last_c)),
        (nid(last_r, 0), nid(last_r, last_c)),
        (nid(0, 0), nid(last_r, 0)),
        (nid(0, last_c), nid(last_r, last_c)),
        (nid(0, mid_c), nid(last_r, mid_c)),
        (nid(mid_r, 0), nid(mid_r, last_c)),
    ]


def _build_d2dmesh(rows, cols, config: BuildConfig):
    if rows < 3 or cols < 3:
        raise SizeUnsupported("diametrical mesh needs at least 3 rows and 3 columns")
    nodes, links = _build_mesh(rows, cols)
    pairs = default_diameter_pairs(rows, cols)
    extra = _augmentation(nodes, links, pairs, config, lambda a, b: LinkKind.DIAMETER_CHANNEL)
    return nodes, links + extra


def _build_bintree(n):
    if n < 2:
        raise SizeUnsupported("binary tree needs at least 2 IP cores")
    log2_exact(n, "binary tree IP count")
    count = n - 1
    first_leaf = count // 2
    nodes = []
    for i in range(count):
        if i >= first_leaf:
            kind = LEAF
        elif i == 0:
            kind = NodeKind(Role.ROOT)
        else:
            kind = NodeKind(Role.STEM)
        nodes.append(Node(i, kind))
    links = []
    for i in range(count):
        for child in (2 * i + 1, 2 * i + 2):
            if child < count:
                links.append(Link(i, child, LinkKind.TREE))
    return nodes, links


def _mot_layout(rows: int, cols: int, internal_roots: bool):
    row_bits = log2_exact(rows, "MoT rows")
    col_bits = log2_exact(cols, "MoT cols")
    if rows < 2 or cols < 2:
        raise SizeUnsupported("MoT needs at least 2 rows and 2 columns")
    nodes: list[Node] = []
    ids: dict[MoTAddress, int] = {}

    def add(kind, addr):
        ids[addr] = len(nodes)
        nodes.append(Node(len(nodes), kind, addr))

    for r in range(rows):
        for c in range(cols):
            add(LEAF, MoTAddress.leaf(r, c, row_bits, col_bits))

    mid_rows = {rows // 2 - 1, rows // 2}
    mid_cols = {cols // 2 - 1, cols // 2}

    def root_kind(orientation, middle):
        placement = None
        if internal_roots:
            placement = Placement.INTERNAL if middle else Placement.EXTERNAL
        return NodeKind(Role.ROOT, orientation, placement)

    for r in range(rows):
        for level in range(col_bits):
            for q in range(1 << level):
                kind = root_kind(Orientation.ROW, r in mid_rows) if level == 0 else NodeKind(Role.STEM, Orientation.ROW)
                add(kind, MoTAddress(r, row_bits, q, level))
    for c in range(cols):
        for level in range(row_bits):
            for p in range(1 << level):
                kind = root_kind(Orientation.COL, c in mid_cols) if level == 0 else NodeKind(Role.STEM, Orientation.COL)
                add(kind, MoTAddress(p, level, c, col_bits))

    links = []
    for node in nodes:
        a = node.address
        if node.kind.orientation is Orientation.ROW:
            for bit in (0, 1):
                links.append(Link(node.id, ids[MoTAddress(a.rn, a.cl, 2 * a.cn + bit, a.rl + 1)], LinkKind.TREE))
        elif node.kind.orientation is Orientation.COL:
            for bit in (0, 1):
                links.append(Link(node.id, ids[MoTAddress(2 * a.rn + bit, a.cl + 1, a.cn, a.rl)], LinkKind.TREE))
    return nodes, links, ids


def _build_mot(rows, cols):
    nodes, links, _ = _mot_layout(rows, cols, internal_roots=False)
    return nodes, links


def default_d2dmot_pairs(rows: int, cols: int) -> list[tuple[int, int]]:
    """Leaf diagonals inside every 2x2 module, then the two internal-root shortcuts."""
    nodes, _, ids = _mot_layout(rows, cols, internal_roots=True)
    row_bits, col_bits = log2_exact(rows), log2_exact(cols)

    def leaf(r, c):
        return r * cols + c

    pairs = []
    for r0 in range(0, rows, 2):
        for c0 in range(0, cols, 2):
            pairs.append((leaf(r0, c0), leaf(r0 + 1, c0 + 1)))
            pairs.append((leaf(r0, c0 + 1), leaf(r0 + 1, c0)))
    mr, mc = rows // 2, cols // 2
    pairs.append((ids[MoTAddress(mr - 1, row_bits, 0, 0)], ids[MoTAddress(mr, row_bits, 0, 0)]))
    pairs.append((ids[MoTAddress(0, 0, mc - 1, col_bits)], ids[MoTAddress(0, 0, mc, col_bits)]))
    return pairs


def _build_d2dmot(rows, cols, config: BuildConfig):
    nodes, links, _ = _mot_layout(rows, cols, internal_roots=True)

    def kind_of(a, b):
        roles = {nodes[a].kind.role, nodes[b].kind.role}
        if roles == {Role.LEAF}:
            return LinkKind.DIAGONAL_MODULE
        if roles == {Role.ROOT}:
            return LinkKind.ROOT_SHORTCUT
        raise InvalidAugmentation(f"extra link ({a}, {b}) must join two leaves or two roots")

    extra = _augmentation(nodes, links, default_d2dmot_pairs(rows, cols), config, kind_of)
    return nodes, links + extra


def _augmentation(nodes, links, default_pairs, config, kind_of) -> list[Link]:
    pairs = default_pairs if config.extra_links is None else [tuple(p) for p in config.extra_links]
    if len(pairs) != len(default_pairs):
        raise InvalidAugmentation(f"expected exactly {len(default_pairs)} extra links, got {len(pairs)}")
    existing = {link.pair for link in links}
    extra = []
    for a, b in pairs:
        if not (0 <= a < len(nodes) and 0 <= b < len(nodes)):
            raise InvalidAugmentation(f"extra link ({a}, {b}) references a missing node")
        if a == b:
            raise InvalidAugmentation(f"extra link ({a}, {b}) is a self-loop")
        key = (min(a, b), max(a, b))
        if key in existing:
            raise InvalidAugmentation(f"extra link {key} duplicates an existing link")
        existing.add(key)
        extra.append(Link(a, b, kind_of(a, b)))
    return extra


def build_topology(family, size, config: BuildConfig | None = None, attach: bool = True) -> Topology:
    """Build a connected router graph; IP cores are attached unless ``attach`` is false."""
    family = Family.parse(family)
    config = config or BuildConfig()
    size = normalize_size(family, size)
    if any(s < 2 for s in size):
        raise SizeUnsupported(f"sizes must be at least 2, got {size}")
    if config.extra_links is not None and family not in (Family.D2DMESH, Family.D2DMOT):
        raise InvalidAugmentation(f"{family.value} takes no extra links")

    if family is Family.MESH:
        nodes, links = _build_mesh(*size)
    elif family is Family.TORUS:
        nodes, links = _build_torus(*size)
    elif family is Family.D2DMESH:
        nodes, links = _build_d2dmesh(*size, config)
    elif family is Family.BINARY_TREE:
        nodes, links = _build_bintree(*size)
    elif family is Family.MOT:
        nodes, links = _build_mot(*size)
    elif family is Family.D2DMOT:
        nodes, links = _build_d2dmot(*size, config)
    else:
        raise SizeUnsupported(f"no graph builder for {family.value}")

    topo = Topology(family, size, tuple(nodes), tuple(links))
    if not is_connected(topo.adjacency):
        raise Disconnected(f"{family.value}{size} build is not connected")
    return attach_ips(topo) if attach else topo


def from_edges(num_nodes: int, edges: Iterable[tuple[int, int]]) -> Topology:
    """A custom undirected topology; duplicate and reversed pairs collapse into one link."""
    pairs = sorted({(min(a, b), max(a, b)) for a, b in edges if a != b})
    nodes = tuple(Node(i, SWITCH) for i in range(num_nodes))
    topo = Topology(Family.CUSTOM, (num_nodes,), nodes, tuple(Link(a, b, LinkKind.PLAIN) for a, b in pairs))
    _check_links(topo)
    return topo


def ip_rule(topo: Topology) -> dict[int, int]:
    """How many IP cores each router receives under the family's attachment rule."""
    fam = topo.family
    if fam in (Family.MESH, Family.TORUS, Family.D2DMESH, Family.CUSTOM):
        return {n.id: 1 for n in topo.nodes}
    per_leaf = {Family.MOT: 1, Family.D2DMOT: 2, Family.BINARY_TREE: 4}[fam]
    return {n.id: per_leaf for n in topo.nodes if n.kind.role is Role.LEAF}


def attach_ips(topo: Topology) -> Topology:
    if topo.ips:
        raise AlreadyAttached(f"{topo.family.value} topology already has IP cores attached")
    return replace(topo, ips=MappingProxyType(ip_rule(topo)))


def node_degree(topo: Topology, node: int, with_ips: bool = False) -> int:
    return topo.degree(node) + (topo.ips.get(node, 0) if with_ips else 0)
