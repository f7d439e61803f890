"""Deterministic flit-level network simulator.

Store-and-forward runs at packet granularity: a packet holds one directed
channel for ``flits * cycles_per_hop`` cycles and must arrive whole before it
requests the next one. Wormhole runs in slots of ``cycles_per_hop`` cycles:
the head acquires channels one by one, each channel moves at most one flit
per slot, and each input buffer holds ``buffer_depth`` flits in FIFO order. A
channel is released once the tail has crossed it.

Routes are fixed per (source, destination) because every routing function is
oblivious. Channel arbitration is FIFO by request time, ties to the lower
packet id. Source queues are unbounded; the run drains until every packet
injected during the measurement window has been delivered.
"""

from __future__ import annotations

import enum
import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import ConfigInvalid, SaturationAbort, SimulationDeadlock
from .routing import RoutingFunction, route_trace
from .topology import Topology


class Switching(str, enum.Enum):
    STORE_AND_FORWARD = "saf"
    WORMHOLE = "wormhole"


@dataclass(frozen=True)
class SimConfig:
    flits_per_packet: int = 4
    cycles_per_hop: int = 1
    injection: float = 2.0  # packets per IP per 100 cycles
    warmup: int = 200
    measure: int = 1000
    seed: int = 1
    switching: Switching = Switching.STORE_AND_FORWARD
    buffer_depth: int = 4
    max_backlog: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "switching", Switching(self.switching))
        for name in ("flits_per_packet", "cycles_per_hop", "measure", "buffer_depth", "max_backlog"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be at least 1")
        if self.warmup < 0:
            raise ConfigInvalid("warmup must be non-negative")
        if self.injection < 0 or self.injection > 100:
            raise ConfigInvalid("injection must lie in [0, 100] packets per IP per 100 cycles")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be a 64-bit unsigned integer")

    @property
    def end_of_window(self) -> int:
        return self.warmup + self.measure


@dataclass(frozen=True)
class TrafficPattern:
    kind: str = "uniform"  # uniform | transpose | hotspot
    hotspot: int | None = None  # IP index receiving the extra share
    weight: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "transpose", "hotspot"):
            raise ConfigInvalid(f"unknown traffic pattern {self.kind!r}")
        if self.kind == "hotspot" and (self.hotspot is None or not 0 <= self.weight <= 1):
            raise ConfigInvalid("hotspot traffic needs an IP index and a weight in [0, 1]")

    def destination(self, src: int, n_ips: int, rng: random.Random) -> int | None:
        """Destination IP for a packet from ``src``, or ``None`` when it has none."""
        if n_ips < 2:
            return None
        if self.kind == "transpose":
            side = math.isqrt(n_ips)
            if side * side != n_ips:
                raise ConfigInvalid(f"transpose traffic needs a square IP count, got {n_ips}")
            dst = (src % side) * side + src // side
            return None if dst == src else dst
        if self.kind == "hotspot" and self.hotspot != src and rng.random() < self.weight:
            if not 0 <= self.hotspot < n_ips:
                raise ConfigInvalid(f"hotspot IP {self.hotspot} out of range")
            return self.hotspot
        dst = rng.randrange(n_ips - 1)
        return dst + 1 if dst >= src else dst


@dataclass(frozen=True)
class Injection:
    time: int
    src_ip: int
    dst_ip: int


@dataclass(frozen=True)
class SimStats:
    packets_injected: int
    packets_delivered: int
    avg_latency: float
    p99_latency: int
    throughput: float  # flits per cycle over the measured span
    total_transfer_time: int
    avg_hops: float
    flits_injected: int
    flits_delivered: int

    def as_row(self) -> dict:
        return {
            "avg_latency": round(self.avg_latency, 6),
            "p99_latency": self.p99_latency,
            "throughput": round(self.throughput, 6),
            "total_transfer_time": self.total_transfer_time,
        }


def generate_injections(n_ips: int, traffic: TrafficPattern, config: SimConfig) -> list[Injection]:
    """Bernoulli injections per IP per cycle over warm-up plus measurement."""
    rng = random.Random(config.seed)
    p = config.injection / 100.0
    out = []
    if p == 0 or n_ips < 2:
        return out
    for t in range(config.end_of_window):
        for ip in range(n_ips):
            if rng.random() < p:
                dst = traffic.destination(ip, n_ips, rng)
                if dst is not None:
                    out.append(Injection(t, ip, dst))
    return out


@dataclass
class _Packet:
    pid: int
    inject: int
    channels: list[tuple[int, int]]
    measured: bool
    core: int
    hop: int = 0  # store-and-forward: index of the next channel to request
    acquired: int = 0  # wormhole: channels acquired so far
    sent: list[int] = field(default_factory=list)
    requested: bool = False
    delivered_at: int | None = None


class _Engine:
    def __init__(self, topology: Topology, routing: RoutingFunction, config: SimConfig):
        self.topology = topology
        self.routing = routing
        self.config = config
        self.ips = topology.ip_list()
        self._routes: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.flits_injected = 0  # measured packets only
        self.flits_delivered = 0
        self.window_snapshot: tuple[int, int, int] | None = None

    def route(self, src: int, dst: int) -> list[tuple[int, int]]:
        key = (src, dst)
        if key not in self._routes:
            path = route_trace(self.routing, src, dst, self.topology).path
            self._routes[key] = list(zip(path, path[1:]))
        return self._routes[key]

    def make_packets(self, injections: list[Injection], measure_from: int, measure_to: int) -> list[_Packet]:
        packets = []
        for pid, inj in enumerate(sorted(injections, key=lambda i: (i.time, i.src_ip, i.dst_ip))):
            src_node, _ = self.ips[inj.src_ip]
            dst_node, core = self.ips[inj.dst_ip]
            packets.append(
                _Packet(pid, inj.time, self.route(src_node, dst_node), measure_from <= inj.time < measure_to, core)
            )
        return packets

    # -- accounting ------------------------------------------------------------

    def _inject(self, p: _Packet):
        if p.measured:
            self.flits_injected += self.config.flits_per_packet

    def _deliver(self, p: _Packet, t: int, flits: int):
        if p.measured:
            self.flits_delivered += flits
        if flits and p.delivered_at is None and self._done(p):
            p.delivered_at = t

    def _done(self, p):
        f = self.config.flits_per_packet
        if self.config.switching is Switching.STORE_AND_FORWARD:
            return True
        return not p.channels or p.sent[-1] == f

    # -- store and forward -------------------------------------------------------

    def run_saf(self, packets: list[_Packet], snapshot_at: int | None) -> None:
        f, cph = self.config.flits_per_packet, self.config.cycles_per_hop
        hold = f * cph
        owner: dict[tuple[int, int], int | None] = {}
        waiting: dict[tuple[int, int], list[tuple[int, int]]] = {}
        events: list[tuple[int, int, int, int]] = []  # (time, kind, pid, seq); kind 0 arrive, 1 inject
        for p in packets:
            heapq.heappush(events, (p.inject, 1, p.pid, 0))
        in_system = 0
        in_flight_flits = 0  # measured flits injected and not yet delivered

        while events:
            t = events[0][0]
            if snapshot_at is not None and self.window_snapshot is None and t >= snapshot_at:
                self.window_snapshot = (self.flits_injected, self.flits_delivered, in_flight_flits)
            dirty = set()
            while events and events[0][0] == t:
                _, kind, pid, _ = heapq.heappop(events)
                p = packets[pid]
                if kind == 1:
                    self._inject(p)
                    in_system += 1
                    in_flight_flits += f if p.measured else 0
                    if in_system > self.config.max_backlog:
                        raise SaturationAbort(f"backlog {in_system} exceeds bound", t, in_system)
                else:
                    ch = p.channels[p.hop]
                    owner[ch] = None
                    dirty.add(ch)
                    p.hop += 1
                if p.hop == len(p.channels):
                    self._deliver(p, t, f)
                    in_system -= 1
                    in_flight_flits -= f if p.measured else 0
                else:
                    ch = p.channels[p.hop]
                    heapq.heappush(waiting.setdefault(ch, []), (t, pid))
                    dirty.add(ch)
            for ch in sorted(dirty):
                queue = waiting.get(ch)
                if queue and owner.get(ch) is None:
                    _, pid = heapq.heappop(queue)
                    owner[ch] = pid
                    heapq.heappush(events, (t + hold, 0, pid, 0))
        if snapshot_at is not None and self.window_snapshot is None:
            self.window_snapshot = (self.flits_injected, self.flits_delivered, in_flight_flits)

    # -- wormhole ----------------------------------------------------------------

    def run_wormhole(self, packets: list[_Packet], snapshot_at: int | None) -> None:
        f, cph, depth = self.config.flits_per_packet, self.config.cycles_per_hop, self.config.buffer_depth
        owner: dict[tuple[int, int], int | None] = {}
        waiting: dict[tuple[int, int], list[tuple[int, int]]] = {}
        buffers: dict[tuple[int, int], deque] = {}  # channel -> deque of [pid, flits] at its far end
        occupancy: dict[tuple[int, int], int] = {}
        pending = deque(sorted(packets, key=lambda p: (math.ceil(p.inject / cph), p.pid)))
        active: list[_Packet] = []

        def in_flight():
            return sum(f - p.sent[-1] for p in active if p.measured)

        slot = 0
        while pending or active:
            if not active:
                slot = max(slot, math.ceil(pending[0].inject / cph))
            t = slot * cph
            if snapshot_at is not None and self.window_snapshot is None and t >= snapshot_at:
                self.window_snapshot = (self.flits_injected, self.flits_delivered, in_flight())
            while pending and pending[0].inject <= t:
                p = pending.popleft()
                self._inject(p)
                p.sent = [0] * len(p.channels)
                if not p.channels:
                    self._deliver(p, p.inject, f)
                    continue
                active.append(p)
            if len(active) > self.config.max_backlog:
                raise SaturationAbort(f"backlog {len(active)} exceeds bound", t, len(active))

            progress = False
            # head flits ready at a router ask for their next channel
            for p in active:
                k = p.acquired
                if p.requested or k == len(p.channels):
                    continue
                if k > 0:
                    buf = buffers.get(p.channels[k - 1])
                    if not buf or buf[0][0] != p.pid or p.sent[k] != 0:
                        continue
                heapq.heappush(waiting.setdefault(p.channels[k], []), (t, p.pid))
                p.requested = True
            for ch in sorted(waiting):
                queue = waiting[ch]
                if queue and owner.get(ch) is None:
                    _, pid = heapq.heappop(queue)
                    owner[ch] = pid
                    pk = packets[pid]
                    pk.acquired += 1
                    pk.requested = False
                    progress = True

            released = []
            for p in active:
                last = len(p.channels) - 1
                for k in range(p.acquired - 1, -1, -1):
                    if p.sent[k] == f:
                        continue
                    ch = p.channels[k]
                    if k > 0:
                        up = buffers.get(p.channels[k - 1])
                        if not up or up[0][0] != p.pid or p.sent[k - 1] <= p.sent[k]:
                            continue
                    elif p.sent[0] >= f:
                        continue
                    if k < last and occupancy.get(ch, 0) >= depth:
                        continue
                    if k > 0:
                        upch = p.channels[k - 1]
                        up[0][1] -= 1
                        occupancy[upch] -= 1
                        if up[0][1] == 0:
                            up.popleft()
                    p.sent[k] += 1
                    progress = True
                    if k < last:
                        buf = buffers.setdefault(ch, deque())
                        if buf and buf[-1][0] == p.pid:
                            buf[-1][1] += 1
                        else:
                            buf.append([p.pid, 1])
                        occupancy[ch] = occupancy.get(ch, 0) + 1
                    else:
                        self._deliver(p, t + cph, 1)
                    if p.sent[k] == f:
                        released.append(ch)
            for ch in released:
                owner[ch] = None
            if active and not progress:
                raise SimulationDeadlock(f"no flit moved at cycle {t} with {len(active)} packets in flight")
            active = [p for p in active if p.delivered_at is None]
            slot += 1
        if snapshot_at is not None and self.window_snapshot is None:
            self.window_snapshot = (self.flits_injected, self.flits_delivered, 0)


def _percentile(values: list[int], q: float) -> int:
    if not values:
        return 0
    ordered = sorted(values)
    rank = max(1, math.ceil(q * len(ordered)))
    return ordered[rank - 1]


def simulate_injections(topology: Topology, routing: RoutingFunction, injections: list[Injection],
                        config: SimConfig, measure_from: int = 0, measure_to: int | None = None) -> SimStats:
    """Run an explicit injection list; packets injected in ``[measure_from, measure_to)`` are measured."""
    if topology.ip_count == 0:
        raise ConfigInvalid("topology has no IP cores attached")
    measure_to = math.inf if measure_to is None else measure_to
    engine = _Engine(topology, routing, config)
    packets = engine.make_packets(injections, measure_from, measure_to)
    snapshot_at = None if measure_to == math.inf else measure_to
    if config.switching is Switching.STORE_AND_FORWARD:
        engine.run_saf(packets, snapshot_at)
    else:
        engine.run_wormhole(packets, snapshot_at)

    measured = [p for p in packets if p.measured]
    f = config.flits_per_packet
    if engine.flits_delivered != engine.flits_injected or any(p.delivered_at is None for p in measured):
        raise AssertionError("flit conservation violated: not every measured flit was delivered")
    if engine.window_snapshot is not None:
        injected, delivered, in_flight = engine.window_snapshot
        if injected != delivered + in_flight:
            raise AssertionError(f"flit conservation violated at window end: {injected} != {delivered} + {in_flight}")

    latencies = [p.delivered_at - p.inject for p in measured]
    last = max((p.delivered_at for p in measured), default=None)
    start = measure_from if measured else 0
    total = last if last is not None else measure_from
    span = (last - start) if last is not None else 0
    return SimStats(
        packets_injected=len(measured),
        packets_delivered=sum(p.delivered_at is not None for p in measured),
        avg_latency=sum(latencies) / len(latencies) if latencies else 0.0,
        p99_latency=_percentile(latencies, 0.99),
        throughput=(len(measured) * f / span) if span > 0 else 0.0,
        total_transfer_time=total,
        avg_hops=sum(len(p.channels) for p in measured) / len(measured) if measured else 0.0,
        flits_injected=engine.flits_injected,
        flits_delivered=engine.flits_delivered,
    )


def simulate(topology: Topology, routing: RoutingFunction, traffic: TrafficPattern | None = None,
             config: SimConfig | None = None) -> SimStats:
    """Seeded synthetic run; only packets injected after warm-up are measured."""
    traffic = traffic or TrafficPattern()
    config = config or SimConfig()
    injections = generate_injections(topology.ip_count, traffic, config)
    return simulate_injections(topology, routing, injections, config, config.warmup, config.end_of_window)


# -- family comparison ----------------------------------------------------------


COMPARED_FAMILIES = ("d2dmot", "mot", "mesh")
_DEFAULT_ROUTING = {"d2dmot": "d2dmot", "mot": "mot", "mesh": "xy"}


def matched_size(family: str, n: int) -> tuple[int, int]:
    """Grid size for ``family`` at comparison scale ``n``.

    The tree families use an ``n x n`` leaf grid; the mesh is the smallest
    square holding at least as many IP cores as the n x n D2D-MoT (2 n^2).
    """
    if family in ("d2dmot", "mot"):
        return (n, n)
    if family == "mesh":
        side = math.isqrt(2 * n * n - 1) + 1
        return (side, side)
    raise ConfigInvalid(f"{family!r} is not a compared family")


def speedup_pct(baseline: float, candidate: float) -> float:
    """Percent reduction of ``candidate`` relative to ``baseline``."""
    return 0.0 if baseline == 0 else (baseline - candidate) / baseline * 100.0


@dataclass(frozen=True)
class ComparisonRow:
    size: int
    ip_blocks: int
    stats: dict[str, SimStats]
    baseline: str = "mesh"

    @property
    def t_d2dmot(self) -> int:
        return self.stats["d2dmot"].total_transfer_time

    @property
    def t_mot(self) -> int:
        return self.stats["mot"].total_transfer_time

    @property
    def t_mesh(self) -> int:
        return self.stats[self.baseline].total_transfer_time

    @property
    def speedup_pct(self) -> float:
        return speedup_pct(self.t_mesh, self.t_d2dmot)

    def as_row(self) -> dict:
        return {
            "ip_blocks": self.ip_blocks,
            "t_d2dmot": self.t_d2dmot,
            "t_mot": self.t_mot,
            "t_mesh": self.t_mesh,
            "speedup_pct": round(self.speedup_pct, 4),
        }


def compare_families(sizes, traffic: TrafficPattern | None = None, config: SimConfig | None = None,
                     normalize_load: bool = True, baseline: str = "mesh") -> list[ComparisonRow]:
    """Simulate D2D-MoT, MoT and mesh at each scale under the same traffic and seed.

    With ``normalize_load`` each family's per-IP injection rate is scaled so
    that every network receives the total offered load of the D2D-MoT at that
    scale. ``baseline`` names the family in the ``t_mesh`` column; passing
    ``"d2dmot"`` compares the proposal with itself.
    """
    from .routing import make_router
    from .topology import build_topology

    traffic = traffic or TrafficPattern()
    config = config or SimConfig()
    rows = []
    for n in sizes:
        topologies = {fam: build_topology(fam, matched_size(fam, n)) for fam in COMPARED_FAMILIES}
        reference_ips = topologies["d2dmot"].ip_count
        stats = {}
        for fam, topo in topologies.items():
            cfg = config
            if normalize_load:
                rate = config.injection * reference_ips / topo.ip_count
                cfg = SimConfig(**{**config.__dict__, "injection": min(rate, 100.0)})
            stats[fam] = simulate(topo, make_router(_DEFAULT_ROUTING[fam], topo), traffic, cfg)
        rows.append(ComparisonRow(n, reference_ips, stats, baseline))
    return rows
