"""JSON (de)serialization of instances and solutions, format version 1."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .model import Arc, Demand, GlobalParams, Instance, ModelError, NetworkGraph, PlanSolution, SPath

FORMAT_VERSION = 1

PathLike = Union[str, Path]


def _check_version(doc: dict[str, Any]) -> None:
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    p = instance.params
    return {
        "format_version": FORMAT_VERSION,
        "params": {
            "C": p.hypercycle_len,
            "R": p.max_extra_shift,
            "cycle_duration_us": p.cycle_duration_us,
            "du_size_bytes": p.du_size_bytes,
        },
        "nodes": list(instance.graph.nodes),
        "arcs": [
            {"src": a.src, "dst": a.dst, "delay_cycles": a.delay, "capacity_du": a.capacity}
            for a in instance.graph.arcs
        ],
        "demands": [
            {
                "id": d.id,
                "src": d.source,
                "dst": d.target,
                "pattern": list(d.pattern),
                "deadline_cycles": d.deadline,
                "packet_size_du": d.packet_size,
            }
            for d in instance.demands
        ],
    }


def instance_from_dict(doc: dict[str, Any]) -> Instance:
    _check_version(doc)
    try:
        p = doc["params"]
        params = GlobalParams(
            hypercycle_len=int(p["C"]),
            max_extra_shift=int(p["R"]),
            cycle_duration_us=float(p.get("cycle_duration_us", 10.0)),
            du_size_bytes=int(p.get("du_size_bytes", 500)),
        )
        graph = NetworkGraph(
            nodes=tuple(str(v) for v in doc["nodes"]),
            arcs=tuple(
                Arc(str(a["src"]), str(a["dst"]), int(a["delay_cycles"]), int(a["capacity_du"]))
                for a in doc["arcs"]
            ),
        )
        demands = tuple(
            Demand(
                id=str(d["id"]),
                source=str(d["src"]),
                target=str(d["dst"]),
                pattern=tuple(int(b) for b in d["pattern"]),
                deadline=int(d["deadline_cycles"]),
                packet_size=int(d.get("packet_size_du", 1)),
            )
            for d in doc.get("demands", [])
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed instance document: {exc!r}") from exc
    return Instance(params, graph, demands)


def spath_to_dict(p: SPath) -> dict[str, Any]:
    return {"demand": p.demand, "arcs": [list(a) for a in p.arcs], "shifts": list(p.shifts)}


def spath_from_dict(doc: dict[str, Any]) -> SPath:
    try:
        return SPath(
            demand=str(doc["demand"]),
            arcs=tuple((str(u), str(v)) for u, v in doc["arcs"]),
            shifts=tuple(int(r) for r in doc.get("shifts", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed assignment: {exc!r}") from exc


def solution_to_dict(solution: PlanSolution) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "assignments": [spath_to_dict(p) for p in solution.paths],
        "objective": solution.objective,
    }


def solution_paths_from_dict(doc: dict[str, Any]) -> list[SPath]:
    """Assignments as listed in the document, duplicates preserved (for validation)."""
    _check_version(doc)
    return [spath_from_dict(a) for a in doc.get("assignments", [])]


def solution_from_dict(doc: dict[str, Any], instance: Instance) -> PlanSolution:
    return PlanSolution.from_paths(instance, solution_paths_from_dict(doc))


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)


def load_instance(path: PathLike) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_instance(instance: Instance, path: PathLike) -> None:
    Path(path).write_text(dumps(instance_to_dict(instance)) + "\n", encoding="utf-8")


def load_solution(path: PathLike, instance: Instance) -> PlanSolution:
    return solution_from_dict(json.loads(Path(path).read_text(encoding="utf-8")), instance)


def save_solution(solution: PlanSolution, path: PathLike) -> None:
    Path(path).write_text(dumps(solution_to_dict(solution)) + "\n", encoding="utf-8")
