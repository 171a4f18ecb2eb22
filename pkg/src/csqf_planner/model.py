"""Instance, demand and scheduled-path data model plus cycle-shift arithmetic.

Everything here is cycle-indexed: delays, deadlines and shifts are integer
cycles, capacities and patterns are integer data units (du) per cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

ArcKey = tuple[str, str]


class ModelError(ValueError):
    """Raised for inconsistent instances or references to unknown objects."""


@dataclass(frozen=True)
class GlobalParams:
    hypercycle_len: int
    max_extra_shift: int
    cycle_duration_us: float = 10.0
    du_size_bytes: int = 500

    def __post_init__(self) -> None:
        if self.hypercycle_len < 1:
            raise ModelError(f"hypercycle length must be >= 1, got {self.hypercycle_len}")
        if self.max_extra_shift < 0:
            raise ModelError(f"max extra shift must be >= 0, got {self.max_extra_shift}")

    @property
    def C(self) -> int:
        return self.hypercycle_len

    @property
    def R(self) -> int:
        return self.max_extra_shift


@dataclass(frozen=True)
class Arc:
    src: str
    dst: str
    delay: int
    capacity: int

    def __post_init__(self) -> None:
        if self.delay < 1:
            raise ModelError(f"arc {self.key} delay must be >= 1 cycle, got {self.delay}")
        if self.capacity < 0:
            raise ModelError(f"arc {self.key} capacity must be >= 0, got {self.capacity}")
        if self.src == self.dst:
            raise ModelError(f"self-loop arc at {self.src}")

    @property
    def key(self) -> ArcKey:
        return (self.src, self.dst)


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise ModelError("duplicate node ids")
        known = set(self.nodes)
        seen: set[ArcKey] = set()
        for a in self.arcs:
            if a.src not in known or a.dst not in known:
                raise ModelError(f"arc {a.key} references an unknown node")
            if a.key in seen:
                raise ModelError(f"duplicate arc {a.key}")
            seen.add(a.key)

    @cached_property
    def arc_index(self) -> dict[ArcKey, int]:
        return {a.key: i for i, a in enumerate(self.arcs)}

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def out_arcs(self) -> dict[str, tuple[int, ...]]:
        """Arc indices leaving each node, in declaration order."""
        out: dict[str, list[int]] = {v: [] for v in self.nodes}
        for i, a in enumerate(self.arcs):
            out[a.src].append(i)
        return {v: tuple(ix) for v, ix in out.items()}

    @cached_property
    def in_arcs(self) -> dict[str, tuple[int, ...]]:
        inc: dict[str, list[int]] = {v: [] for v in self.nodes}
        for i, a in enumerate(self.arcs):
            inc[a.dst].append(i)
        return {v: tuple(ix) for v, ix in inc.items()}

    @cached_property
    def capacities(self) -> np.ndarray:
        return np.array([a.capacity for a in self.arcs], dtype=np.int64)

    @cached_property
    def delays(self) -> np.ndarray:
        return np.array([a.delay for a in self.arcs], dtype=np.int64)

    @cached_property
    def usable_out(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Per node index: (arc index, head node index, delay) of arcs with capacity > 0."""
        out: list[list[tuple[int, int, int]]] = [[] for _ in self.nodes]
        ni = self.node_index
        for i, a in enumerate(self.arcs):
            if a.capacity > 0:
                out[ni[a.src]].append((i, ni[a.dst], a.delay))
        return tuple(tuple(x) for x in out)

    @cached_property
    def usable_in(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Per node index: (arc index, tail node index, delay) of arcs with capacity > 0."""
        inc: list[list[tuple[int, int, int]]] = [[] for _ in self.nodes]
        ni = self.node_index
        for i, a in enumerate(self.arcs):
            if a.capacity > 0:
                inc[ni[a.dst]].append((i, ni[a.src], a.delay))
        return tuple(tuple(x) for x in inc)

    def arc(self, key: ArcKey) -> Arc:
        try:
            return self.arcs[self.arc_index[tuple(key)]]
        except KeyError:
            raise ModelError(f"unknown arc {key}") from None


@dataclass(frozen=True)
class Demand:
    id: str
    source: str
    target: str
    pattern: tuple[int, ...]
    deadline: int
    packet_size: int = 1

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ModelError(f"demand {self.id}: source equals destination")
        if any(b < 0 for b in self.pattern):
            raise ModelError(f"demand {self.id}: negative pattern entry")
        if not any(self.pattern):
            raise ModelError(f"demand {self.id}: all-zero pattern")
        if self.packet_size < 1:
            raise ModelError(f"demand {self.id}: packet size must be >= 1")
        if any(b % self.packet_size for b in self.pattern):
            raise ModelError(
                f"demand {self.id}: pattern entries must be multiples of packet size {self.packet_size}"
            )
        if self.deadline < 0:
            raise ModelError(f"demand {self.id}: negative deadline")

    @cached_property
    def bandwidth(self) -> int:
        return int(sum(self.pattern))

    @cached_property
    def pattern_array(self) -> np.ndarray:
        return np.asarray(self.pattern, dtype=np.int64)

    @cached_property
    def rotations(self) -> np.ndarray:
        """rotations[k][c] = pattern[(c + k) % C]; read-only."""
        C = len(self.pattern)
        idx = (np.arange(C)[:, None] + np.arange(C)[None, :]) % C
        rot = self.pattern_array[idx]
        rot.setflags(write=False)
        return rot


@dataclass(frozen=True)
class SPath:
    """A routing path together with the extra shift chosen at each intermediate node."""

    demand: str
    arcs: tuple[ArcKey, ...]
    shifts: tuple[int, ...]

    @classmethod
    def make(cls, demand: str, arcs: Iterable[Sequence[str]], shifts: Iterable[int] = ()) -> "SPath":
        arcs_t = tuple((str(u), str(v)) for u, v in arcs)
        shifts_t = tuple(int(r) for r in shifts)
        if not shifts_t and len(arcs_t) > 1:
            shifts_t = (0,) * (len(arcs_t) - 1)
        return cls(demand, arcs_t, shifts_t)

    @property
    def nodes(self) -> tuple[str, ...]:
        if not self.arcs:
            return ()
        return (self.arcs[0][0],) + tuple(v for _, v in self.arcs)

    @property
    def total_shift(self) -> int:
        return sum(self.shifts)

    def sort_key(self) -> tuple:
        return (len(self.arcs), self.total_shift, self.arcs, self.shifts)


@dataclass(frozen=True)
class Instance:
    params: GlobalParams
    graph: NetworkGraph
    demands: tuple[Demand, ...]

    def __post_init__(self) -> None:
        C = self.params.hypercycle_len
        known = set(self.graph.nodes)
        ids: set[str] = set()
        for d in self.demands:
            if d.id in ids:
                raise ModelError(f"duplicate demand id {d.id}")
            ids.add(d.id)
            if len(d.pattern) != C:
                raise ModelError(f"demand {d.id}: pattern length {len(d.pattern)} != C={C}")
            if d.source not in known or d.target not in known:
                raise ModelError(f"demand {d.id}: unknown endpoint")

    @cached_property
    def demand_index(self) -> dict[str, int]:
        return {d.id: i for i, d in enumerate(self.demands)}

    def demand(self, demand_id: str) -> Demand:
        try:
            return self.demands[self.demand_index[demand_id]]
        except KeyError:
            raise ModelError(f"unknown demand {demand_id}") from None

    @property
    def C(self) -> int:
        return self.params.hypercycle_len

    @property
    def R(self) -> int:
        return self.params.max_extra_shift

    @property
    def total_bandwidth(self) -> int:
        return sum(d.bandwidth for d in self.demands)

    def with_params(self, **changes) -> "Instance":
        from dataclasses import replace

        return Instance(replace(self.params, **changes), self.graph, self.demands)

    def with_demands(self, demands: Iterable[Demand]) -> "Instance":
        return Instance(self.params, self.graph, tuple(demands))


@dataclass(frozen=True)
class PlanSolution:
    assignments: Mapping[str, Optional[SPath]]
    objective: int

    @classmethod
    def from_paths(cls, instance: Instance, paths: Iterable[SPath]) -> "PlanSolution":
        assignments: dict[str, Optional[SPath]] = {d.id: None for d in instance.demands}
        for p in paths:
            instance.demand(p.demand)
            if assignments.get(p.demand) is not None:
                raise ModelError(f"demand {p.demand} assigned twice")
            assignments[p.demand] = p
        objective = sum(instance.demand(k).bandwidth for k, p in assignments.items() if p is not None)
        return cls(assignments, objective)

    @classmethod
    def empty(cls, instance: Instance) -> "PlanSolution":
        return cls.from_paths(instance, ())

    @property
    def paths(self) -> list[SPath]:
        return [p for p in self.assignments.values() if p is not None]

    @property
    def accepted(self) -> list[str]:
        return [k for k, p in self.assignments.items() if p is not None]


def total_bandwidth(d: Demand) -> int:
    """Data units emitted by ``d`` over one hypercycle."""
    return d.bandwidth


def node_shift(p: SPath, k: int, instance: Instance) -> int:
    """Cycles between emission at the source and forwarding at the k-th node of ``p``.

    ``k`` is 1-based: k=1 is the source, k=|p| is the tail of the last arc.
    """
    if not 1 <= k <= len(p.arcs):
        raise ModelError(f"node index {k} outside 1..{len(p.arcs)}")
    total = 0
    for i in range(k - 1):
        total += instance.graph.arc(p.arcs[i]).delay + p.shifts[i]
    return total


def path_delay(p: SPath, instance: Instance) -> int:
    if not p.arcs:
        raise ModelError("empty path")
    return node_shift(p, len(p.arcs), instance) + instance.graph.arc(p.arcs[-1]).delay


def departure_offsets(p: SPath, instance: Instance) -> list[int]:
    """Forwarding shift (not reduced modulo C) at the tail of every arc of ``p``."""
    out = []
    total = 0
    for i, key in enumerate(p.arcs):
        out.append(total)
        total += instance.graph.arc(key).delay
        if i < len(p.shifts):
            total += p.shifts[i]
    return out


def required_bandwidth(d: Demand, p: SPath, a: ArcKey, c: int, instance: Instance) -> int:
    """Data units ``d`` puts on arc ``a`` during cycle ``c`` when routed on ``p``."""
    try:
        k = p.arcs.index(tuple(a))
    except ValueError:
        raise ModelError(f"arc {a} is not on the path of demand {p.demand}") from None
    C = instance.C
    shift = node_shift(p, k + 1, instance)
    return d.pattern[(c + shift) % C]


def path_profile(instance: Instance, p: SPath) -> list[tuple[int, np.ndarray]]:
    """Per-arc load vectors (length C) of ``p`` as (arc index, loads) pairs."""
    rot = instance.demand(p.demand).rotations
    C = instance.C
    arc_index = instance.graph.arc_index
    arcs = instance.graph.arcs
    out = []
    shift = 0
    for k, key in enumerate(p.arcs):
        ai = arc_index.get(key)
        if ai is None:
            raise ModelError(f"unknown arc {key}")
        out.append((ai, rot[shift % C]))
        shift += arcs[ai].delay
        if k < len(p.shifts):
            shift += p.shifts[k]
    return out


def extended_nodes(p: SPath, instance: Instance) -> list[tuple[str, int]]:
    """Nodes of ``p`` in the time-expanded graph: (node, departure offset mod C).

    The destination is reported with its arrival offset.
    """
    C = instance.C
    offsets = departure_offsets(p, instance)
    nodes = [(key[0], off % C) for key, off in zip(p.arcs, offsets)]
    nodes.append((p.arcs[-1][1], path_delay(p, instance) % C))
    return nodes
