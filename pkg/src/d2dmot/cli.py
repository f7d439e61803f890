"""Command-line front end.

    d2dmot build --family d2dmot --rows 4 --cols 4 --out topo.json
    d2dmot analyze --family mot --rows 4 --cols 4
    d2dmot validate --family d2dmot --routing d2dmot --out stretch.csv
    d2dmot simulate --family mesh --rows 6 --cols 6 --injection 3
    d2dmot compare --sizes 4,8
    d2dmot shortest-path matrix.txt 5 7

Failures exit nonzero and print a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .analysis import all_pairs_metrics, bfs_shortest_path, build_cdg, is_deadlock_free
from .errors import NocError
from .params import params_for
from .routing import ROUTERS, make_router, validate_routing
from .sim import SimConfig, Switching, TrafficPattern, compare_families, simulate
from .topology import Family, Topology, build_topology

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_UNREACHABLE = 3


def metrics_row(topology: Topology, routing_name: str | None = None) -> dict:
    """Formula vs measured figures for one topology, in METRICS_HEADER order."""
    measured = all_pairs_metrics(topology, topology.endpoints())
    try:
        formula = params_for(topology.family, _size_of(topology)).diameter
    except (NocError, ValueError):
        formula = None
    routing = make_router(routing_name, topology)
    rows, cols = _rows_cols(topology)
    return {
        "family": topology.family.value,
        "M": rows,
        "N": cols,
        "nodes": topology.num_nodes,
        "links": topology.num_links,
        "diameter_formula": formula,
        "diameter_measured": measured.diameter,
        "avg_hops": float(measured.avg_hops),
        "deadlock_free": is_deadlock_free(build_cdg(topology, routing)),
    }


def _size_of(topology: Topology):
    return topology.size[0] if len(topology.size) == 1 else topology.size


def _rows_cols(topology: Topology) -> tuple[int, int | None]:
    if len(topology.size) == 2:
        return topology.size
    return topology.size[0], None


def _topology_from_args(args) -> Topology:
    if getattr(args, "input", None):
        return Topology.from_json(Path(args.input).read_text())
    family = Family.parse(args.family)
    if family is Family.CUSTOM:
        raise argparse.ArgumentTypeError("custom topologies are read with --input")
    if family is Family.BINARY_TREE:
        return build_topology(family, args.rows)
    return build_topology(family, (args.rows, args.cols or args.rows))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sim_config(args) -> SimConfig:
    return SimConfig(
        flits_per_packet=args.flits,
        cycles_per_hop=args.cph,
        injection=args.injection,
        warmup=args.warmup,
        measure=args.measure,
        seed=args.seed,
        switching=args.switching,
        buffer_depth=args.buffer,
    )


def _traffic(args) -> TrafficPattern:
    if args.traffic == "hotspot":
        return TrafficPattern("hotspot", hotspot=args.hotspot, weight=args.hotspot_weight)
    return TrafficPattern(args.traffic)


# -- commands --------------------------------------------------------------------


def cmd_build(args) -> int:
    topo = _topology_from_args(args)
    _emit(topo.to_json(), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    row = metrics_row(_topology_from_args(args), args.routing)
    if args.format == "json":
        _emit(io.to_json(row), args.out)
    else:
        _emit(io.to_csv([row], io.METRICS_HEADER), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    topo = _topology_from_args(args)
    routing = make_router(args.routing, topo)
    report = validate_routing(routing, topo)
    rows = [
        {"src": p.src, "dst": p.dst, "routed_len": p.routed_len, "bfs_len": p.bfs_len, "stretch": float(p.stretch)}
        for p in report.pairs
    ]
    summary = report.summary()
    summary["deadlock_free"] = is_deadlock_free(build_cdg(topo, routing)) if not report.failures else False
    if args.out:
        Path(args.out).write_text(io.to_csv(rows, io.STRETCH_HEADER))
    sys.stdout.write(io.to_json(summary))
    return EXIT_OK if not report.failures else EXIT_ERROR


def cmd_simulate(args) -> int:
    topo = _topology_from_args(args)
    config = _sim_config(args)
    stats = simulate(topo, make_router(args.routing, topo), _traffic(args), config)
    rows, cols = _rows_cols(topo)
    row = {
        "family": topo.family.value, "M": rows, "N": cols, "ip_count": topo.ip_count,
        "injection": config.injection, "seed": config.seed, **stats.as_row(),
    }
    if args.format == "json":
        _emit(io.to_json(row), args.out)
    else:
        _emit(io.to_csv([row], io.RESULTS_HEADER), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    result = compare_families(sizes, _traffic(args), _sim_config(args), baseline=args.baseline)
    rows = [r.as_row() for r in result]
    if args.format == "json":
        _emit(io.to_json(rows), args.out)
    else:
        _emit(io.to_csv(rows, io.COMPARISON_HEADER), args.out)
    return EXIT_OK


def cmd_shortest_path(args) -> int:
    graph = io.read_adjacency_matrix(args.matrix)
    for v in (args.src, args.dst):
        if not 0 <= v < graph.n:
            raise IndexError(f"vertex {v} outside [0, {graph.n})")
    print(f"No of 1 in the Matrix = {graph.ones}")
    print(f"No of link is = {graph.link_count}")
    result = bfs_shortest_path(graph.adjacency, args.src, args.dst)
    if not result.reachable:
        print(f"Destination {args.dst} is unreachable from {args.src}")
        return EXIT_UNREACHABLE
    print(f"Shortest path = {result.format()}")
    print(f"Minimum distance = {result.distance}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _add_topology_flags(p):
    p.add_argument("--family", default="mesh", choices=[f.value for f in Family])
    p.add_argument("--rows", type=int, default=4)
    p.add_argument("--cols", type=int, default=None, help="defaults to --rows")
    p.add_argument("--input", help="topology JSON written by `build`")
    p.add_argument("--routing", choices=sorted(ROUTERS), default=None)
    p.add_argument("--out")


def _add_sim_flags(p):
    d = SimConfig()
    p.add_argument("--traffic", choices=["uniform", "transpose", "hotspot"], default="uniform")
    p.add_argument("--hotspot", type=int, default=0)
    p.add_argument("--hotspot-weight", type=float, default=0.2)
    p.add_argument("--injection", type=float, default=d.injection, help="packets per IP per 100 cycles")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--flits", type=int, default=d.flits_per_packet)
    p.add_argument("--switching", choices=[s.value for s in Switching], default=d.switching.value)
    p.add_argument("--cph", type=int, default=d.cycles_per_hop, help="cycles per hop")
    p.add_argument("--buffer", type=int, default=d.buffer_depth, help="wormhole buffer depth in flits")
    p.add_argument("--warmup", type=int, default=d.warmup)
    p.add_argument("--measure", type=int, default=d.measure)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="d2dmot", description="NoC topology builder, analyser and simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a topology as JSON")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="diameter, hop count and deadlock check")
    _add_topology_flags(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="exhaustive routing check")
    _add_topology_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run the network simulator")
    _add_topology_flags(p)
    _add_sim_flags(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="D2D-MoT vs MoT vs mesh transfer times")
    _add_sim_flags(p)
    p.add_argument("--sizes", default="4,8")
    p.add_argument("--baseline", choices=["mesh", "mot", "d2dmot"], default="mesh")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("shortest-path", help="BFS query on an adjacency-matrix file")
    p.add_argument("matrix")
    p.add_argument("src", type=int)
    p.add_argument("dst", type=int)
    p.set_defaults(func=cmd_shortest_path)
    return parser


def _error_record(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "code": getattr(exc, "code", "error"), "message": str(exc)})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_USAGE
    except (NocError, ValueError, KeyError, IndexError, OSError) as exc:
        print(_error_record(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
