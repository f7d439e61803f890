"""File formats: adjacency-matrix input and CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass

from .errors import MalformedMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirectedGraph:
    """Graph read from an adjacency matrix; entry ``[i][j] == 1`` is a channel ``i -> j``."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    ones: int  # every 1 entry, diagonal included
    self_loops: tuple[int, ...]

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.adjacency)

    @property
    def link_count(self) -> int:
        """Links as the classic sample-run printout counts them: ones halved."""
        return self.ones // 2

    def is_symmetric(self) -> bool:
        edges = {(u, v) for u, row in enumerate(self.adjacency) for v in row}
        return all((v, u) in edges for u, v in edges)


def parse_adjacency_matrix(text: str) -> DirectedGraph:
    lines = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise MalformedMatrix("empty matrix file")
    if len(lines[0]) != 1:
        raise MalformedMatrix("first line must hold the node count alone")
    try:
        n = int(lines[0][0])
    except ValueError:
        raise MalformedMatrix(f"node count {lines[0][0]!r} is not an integer") from None
    if n < 1:
        raise MalformedMatrix("node count must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise MalformedMatrix(f"expected {n} matrix rows, found {len(rows)}")
    adjacency, ones, loops = [], 0, []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MalformedMatrix(f"row {i} has {len(row)} entries, expected {n}")
        if any(tok not in ("0", "1") for tok in row):
            raise MalformedMatrix(f"row {i} has a non-binary entry")
        ones += row.count("1")
        if row[i] == "1":
            loops.append(i)
        adjacency.append(tuple(j for j, tok in enumerate(row) if tok == "1" and j != i))
    if loops:
        log.warning("ignoring self-loop entries on nodes %s", loops)
    return DirectedGraph(n, tuple(adjacency), ones, tuple(loops))


def read_adjacency_matrix(path) -> DirectedGraph:
    with open(path) as fh:
        return parse_adjacency_matrix(fh.read())


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    if value is None:
        return ""
    return str(value)


def to_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row.get(col)) for col in header])
    return buf.getvalue()


def to_json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


METRICS_HEADER = ["family", "M", "N", "nodes", "links", "diameter_formula", "diameter_measured", "avg_hops",
                  "deadlock_free"]
STRETCH_HEADER = ["src", "dst", "routed_len", "bfs_len", "stretch"]
RESULTS_HEADER = ["family", "M", "N", "ip_count", "injection", "seed", "avg_latency", "p99_latency", "throughput",
                  "total_transfer_time"]
COMPARISON_HEADER = ["ip_blocks", "t_d2dmot", "t_mot", "t_mesh", "speedup_pct"]
