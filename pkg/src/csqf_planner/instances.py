"""Reproducible IPRAN-style instances: BS - CSG - ASG - RSG layers and time-triggered demands.

All time quantities are converted to integer cycles here and nowhere else.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .cg.pricing import shortest_delay
from .model import Arc, Demand, GlobalParams, Instance, NetworkGraph

SCENARIOS: dict[str, tuple[float, float, float]] = {
    "sc1": (0.60, 0.30, 0.10),
    "sc2": (1.00, 0.00, 0.00),
    "sc3": (0.34, 0.33, 0.33),
}

DEADLINES_MS: dict[str, tuple[float, ...]] = {
    "D1": (1.0, 2.0, 3.0),
    "D2": (4.0, 5.0, 6.0),
    "D3": (40.0, 50.0, 60.0),
}


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class IpranParams:
    domains: int = 10
    asg_per_domain: int = 8
    csg_per_asg_pair: int = 20
    rsg_count: int = 20
    bs_per_csg: int = 1
    bs_gbps: float = 100.0
    access_gbps: float = 10.0
    aggregation_gbps: float = 40.0
    core_gbps: tuple[float, ...] = (100.0, 400.0)
    bs_delay_ms: tuple[float, float] = (0.0, 0.0)
    access_delay_ms: tuple[float, float] = (0.2, 0.8)
    aggregation_delay_ms: tuple[float, float] = (0.8, 1.6)
    core_delay_ms: tuple[float, float] = (2.0, 10.0)
    cycle_us: float = 10.0
    processing_us: float = 30.0
    detnet_share: float = 0.5
    C: int = 12
    R: int = 1
    packet_bytes: int = 500
    du_size_bytes: int = 250
    packets_per_cycle: tuple[int, ...] = (1, 2)
    periods: tuple[int, ...] = (2, 3, 6)
    demand_count: int = 250
    mix: tuple[float, float, float] = SCENARIOS["sc1"]
    seed: int = 0

    def __post_init__(self) -> None:
        counts = {
            "domains": self.domains,
            "asg_per_domain": self.asg_per_domain,
            "csg_per_asg_pair": self.csg_per_asg_pair,
        }
        for name, value in counts.items():
            if value < 1:
                raise GenerationError(f"{name} must be >= 1, got {value}")
        if self.asg_per_domain % 2:
            raise GenerationError("asg_per_domain must be even (ASGs come in pairs)")
        if self.rsg_count < 0 or self.bs_per_csg < 0 or self.demand_count < 0:
            raise GenerationError("counts must be non-negative")
        if self.domains > 1 and self.rsg_count < 1:
            raise GenerationError("multi-domain topologies need at least one RSG")
        if not 0.0 <= self.detnet_share <= 1.0:
            raise GenerationError("detnet_share must be in [0, 1]")
        if any(m < 0 for m in self.mix) or not math.isclose(sum(self.mix), 1.0, abs_tol=1e-9):
            raise GenerationError(f"scenario mix must be non-negative and sum to 1, got {self.mix}")
        if self.packet_bytes % self.du_size_bytes:
            raise GenerationError("packet size must be a whole number of data units")
        if not any(self.C % p == 0 for p in self.periods):
            raise GenerationError(f"no period in {self.periods} divides C={self.C}")

    @property
    def du_per_packet(self) -> int:
        return self.packet_bytes // self.du_size_bytes


PRESETS: dict[str, IpranParams] = {
    "tiny": IpranParams(
        domains=1,
        asg_per_domain=2,
        csg_per_asg_pair=4,
        rsg_count=0,
        bs_per_csg=0,
        access_gbps=1.2,
        aggregation_gbps=2.0,
        C=4,
        R=1,
        periods=(2, 4),
        demand_count=6,
        mix=SCENARIOS["sc2"],
    ),
    "desk": IpranParams(
        domains=2,
        asg_per_domain=4,
        csg_per_asg_pair=10,
        rsg_count=4,
        demand_count=1600,
    ),
    "paper": IpranParams(),
}


def preset(name: str, **overrides) -> IpranParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise GenerationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    if "scenario" in overrides:
        overrides["mix"] = SCENARIOS[overrides.pop("scenario")]
    return replace(base, **overrides)


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent RNG stream per named knob."""
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def capacity_du(rate_gbps: float, params: IpranParams) -> int:
    """Per-cycle DetNet capacity of a link in data units."""
    bits = rate_gbps * 1e9 * params.cycle_us * 1e-6 * params.detnet_share
    return int(math.floor(bits / (8 * params.du_size_bytes) + 1e-9))


def delay_cycles(propagation_ms: float, params: IpranParams) -> int:
    """Arc delay: propagation plus the head node's processing, each rounded up to whole cycles."""
    prop = math.ceil(propagation_ms * 1000.0 / params.cycle_us - 1e-9)
    proc = math.ceil(params.processing_us / params.cycle_us - 1e-9)
    return max(int(prop + proc), 1)


def ms_to_cycles(ms: float, params: IpranParams) -> int:
    return int(round(ms * 1000.0 / params.cycle_us))


def demand_rate_mbps(d: Demand, params: IpranParams) -> float:
    """Average rate of a demand over one hypercycle."""
    bits = d.bandwidth * params.du_size_bytes * 8
    return bits / (params.C * params.cycle_us)


@dataclass
class Layout:
    """Node roles of a generated topology."""

    bs: dict[str, str] = field(default_factory=dict)  # endpoint -> csg
    csg_pair: dict[str, tuple[int, int]] = field(default_factory=dict)  # csg -> (domain, pair)
    endpoints: list[str] = field(default_factory=list)


def _names(params: IpranParams):
    asg = lambda dom, k: f"asg{dom}.{k}"
    csg = lambda dom, pair, k: f"csg{dom}.{pair}.{k}"
    bs = lambda dom, pair, k, j: f"bs{dom}.{pair}.{k}" + (f".{j}" if params.bs_per_csg > 1 else "")
    rsg = lambda k: f"rsg{k}"
    return asg, csg, bs, rsg


def build_topology(params: IpranParams) -> tuple[NetworkGraph, Layout]:
    d_rng = stream(params.seed, "topology-delay")
    c_rng = stream(params.seed, "topology-capacity")
    s_rng = stream(params.seed, "ring-shortcuts")
    asg, csg, bs, rsg = _names(params)
    nodes: list[str] = []
    arcs: list[Arc] = []
    layout = Layout()

    def link(u: str, v: str, rate: float, delay_ms: tuple[float, float]) -> None:
        prop = float(d_rng.uniform(*delay_ms)) if delay_ms[1] > delay_ms[0] else delay_ms[0]
        cycles = delay_cycles(prop, params)
        cap = capacity_du(rate, params)
        arcs.append(Arc(u, v, cycles, cap))
        arcs.append(Arc(v, u, cycles, cap))

    pairs = params.asg_per_domain // 2
    for dom in range(params.domains):
        ring = [asg(dom, k) for k in range(params.asg_per_domain)]
        nodes.extend(ring)
        for pair in range(pairs):
            a0, a1 = ring[2 * pair], ring[2 * pair + 1]
            for k in range(params.csg_per_asg_pair):
                c = csg(dom, pair, k)
                nodes.append(c)
                layout.csg_pair[c] = (dom, pair)
                link(c, a0, params.access_gbps, params.access_delay_ms)
                link(c, a1, params.access_gbps, params.access_delay_ms)
                if params.bs_per_csg == 0:
                    layout.endpoints.append(c)
                    layout.bs[c] = c
                for j in range(params.bs_per_csg):
                    b = bs(dom, pair, k, j)
                    nodes.append(b)
                    layout.endpoints.append(b)
                    layout.bs[b] = c
                    link(b, c, params.bs_gbps, params.bs_delay_ms)
        n = len(ring)
        ring_links = {tuple(sorted((i, (i + 1) % n))) for i in range(n) if n > 1}
        for i, j in sorted(ring_links):
            link(ring[i], ring[j], params.aggregation_gbps, params.aggregation_delay_ms)
        chords = [
            (i, j)
            for i, j in itertools.combinations(range(n), 2)
            if (i, j) not in ring_links
        ]
        n_chords = min(n // 4, len(chords))
        if n_chords:
            for idx in sorted(s_rng.choice(len(chords), size=n_chords, replace=False).tolist()):
                i, j = chords[idx]
                link(ring[i], ring[j], params.aggregation_gbps, params.aggregation_delay_ms)

    rsgs = [rsg(k) for k in range(params.rsg_count)]
    nodes.extend(rsgs)
    for k, r in enumerate(rsgs):
        dom = k % params.domains
        for gw in (asg(dom, 0), asg(dom, 1)):
            link(gw, r, float(c_rng.choice(params.core_gbps)), params.core_delay_ms)
    for r1, r2 in itertools.combinations(rsgs, 2):
        link(r1, r2, float(c_rng.choice(params.core_gbps)), params.core_delay_ms)

    return NetworkGraph(tuple(nodes), tuple(arcs)), layout


def generate_topology(params: IpranParams) -> NetworkGraph:
    return build_topology(params)[0]


def demand_pattern(period: int, phase: int, packets: int, params: IpranParams) -> tuple[int, ...]:
    per_cycle = packets * params.du_per_packet
    return tuple(per_cycle if (c - phase) % period == 0 else 0 for c in range(params.C))


def _class_counts(n: int, mix: tuple[float, float, float]) -> list[int]:
    raw = [m * n for m in mix]
    counts = [int(math.floor(x)) for x in raw]
    for i in sorted(range(3), key=lambda i: -(raw[i] - counts[i]))[: n - sum(counts)]:
        counts[i] += 1
    return counts


def generate_demands(params: IpranParams, topology: NetworkGraph, layout: Optional[Layout] = None) -> list[Demand]:
    """BS-to-BS demands with periodic patterns, random phases and class-dependent deadlines."""
    if layout is None:
        _, layout = build_topology(params)
    gparams = GlobalParams(params.C, params.R, params.cycle_us, params.du_size_bytes)
    probe = Instance(gparams, topology, ())
    eps = layout.endpoints
    if len(eps) < 2 and params.demand_count:
        raise GenerationError("not enough endpoints to create demands")

    def group(e: str) -> tuple[int, int]:
        return layout.csg_pair[layout.bs[e]]

    peers: dict[str, dict[str, list[str]]] = {}
    for e in eps:
        dom, pair = group(e)
        peers[e] = {
            "D1": [f for f in eps if f != e and group(f) == (dom, pair)],
            "D2": [f for f in eps if group(f)[0] == dom and group(f)[1] != pair],
            "D3": [f for f in eps if group(f)[0] != dom],
        }

    counts = _class_counts(params.demand_count, params.mix)
    classes = [c for c, n in zip(("D1", "D2", "D3"), counts) for _ in range(n)]
    stream(params.seed, "demand-class").shuffle(classes)
    src_rng = stream(params.seed, "demand-source")
    dst_rng = stream(params.seed, "demand-destination")
    period_rng = stream(params.seed, "pattern-period")
    phase_rng = stream(params.seed, "pattern-phase")
    size_rng = stream(params.seed, "pattern-packets")
    deadline_rng = stream(params.seed, "deadline")
    periods = [p for p in params.periods if params.C % p == 0]
    dist_cache: dict[tuple[str, str], float] = {}

    demands = []
    for i, cls in enumerate(classes):
        choices = DEADLINES_MS[cls]
        drawn = int(deadline_rng.integers(len(choices)))
        period = int(period_rng.choice(periods))
        phase = int(phase_rng.integers(period))
        packets = int(size_rng.choice(params.packets_per_cycle))
        sources = [e for e in eps if peers[e][cls]]
        if not sources:
            raise GenerationError(f"topology has no endpoint pair of class {cls}")
        src_order = [sources[int(k)] for k in src_rng.permutation(len(sources))]
        dst_order: dict[str, list[str]] = {}
        chosen = None
        # a deadline with no feasible pair falls back to the class's larger deadlines
        for deadline_ms in choices[drawn:]:
            deadline = ms_to_cycles(deadline_ms, params)
            for src in src_order:
                if src not in dst_order:
                    dst_order[src] = [peers[src][cls][int(k)] for k in dst_rng.permutation(len(peers[src][cls]))]
                for dst in dst_order[src]:
                    key = (src, dst)
                    if key not in dist_cache:
                        dist_cache[key] = shortest_delay(probe, src, dst)
                    if dist_cache[key] <= deadline:
                        chosen = (src, dst)
                        break
                if chosen:
                    break
            if chosen:
                break
        if chosen is None:
            raise GenerationError(f"no deadline-feasible {cls} pair for demand {i}")
        demands.append(
            Demand(
                id=f"d{i}",
                source=chosen[0],
                target=chosen[1],
                pattern=demand_pattern(period, phase, packets, params),
                deadline=deadline,
                packet_size=params.du_per_packet,
            )
        )
    return demands


def generate_instance(params: IpranParams) -> Instance:
    topology, layout = build_topology(params)
    demands = generate_demands(params, topology, layout)
    gparams = GlobalParams(params.C, params.R, params.cycle_us, params.du_size_bytes)
    return Instance(gparams, topology, tuple(demands))
