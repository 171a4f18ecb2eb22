"""Request and response bodies of the planning service.

Instance and solution documents keep the on-disk JSON layout so files can be posted unchanged.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..cg import DEFAULT_RR_RUNS
from ..greedy import EPSILON
from ..io import FORMAT_VERSION


class ParamsModel(BaseModel):
    C: int = Field(ge=1)
    R: int = Field(ge=0)
    cycle_duration_us: float = 10.0
    du_size_bytes: int = 500


class ArcModel(BaseModel):
    src: str
    dst: str
    delay_cycles: int = Field(ge=1)
    capacity_du: int = Field(ge=0)


class DemandModel(BaseModel):
    id: str
    src: str
    dst: str
    pattern: list[int]
    deadline_cycles: int
    packet_size_du: int = Field(default=1, ge=1)


class InstanceModel(BaseModel):
    format_version: int = FORMAT_VERSION
    params: ParamsModel
    nodes: list[str]
    arcs: list[ArcModel]
    demands: list[DemandModel] = Field(default_factory=list)


class AssignmentModel(BaseModel):
    demand: str
    arcs: list[tuple[str, str]]
    shifts: list[int] = Field(default_factory=list)


class SolutionModel(BaseModel):
    format_version: int = FORMAT_VERSION
    assignments: list[AssignmentModel] = Field(default_factory=list)
    objective: Optional[int] = None


class SolveOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithm: Literal["greedy", "cg-rr", "nocycleinfo", "oracle"] = "cg-rr"
    strengthen: bool = True
    rr_runs: int = Field(default=DEFAULT_RR_RUNS, ge=1)
    seed: int = 0
    order: str = "input"
    k: Optional[int] = Field(default=None, ge=1)
    epsilon: float = Field(default=EPSILON, gt=0)


class SolveRequest(BaseModel):
    instance: InstanceModel
    options: SolveOptions = Field(default_factory=SolveOptions)


class SolveResponse(BaseModel):
    solution: SolutionModel
    metrics: dict[str, Any]


class ValidateRequest(BaseModel):
    instance: InstanceModel
    solution: SolutionModel


class ViolationModel(BaseModel):
    kind: str
    demand: Optional[str] = None
    arc: Optional[tuple[str, str]] = None
    cycle: Optional[int] = None
    magnitude: Optional[float] = None
    detail: str = ""


class ValidateResponse(BaseModel):
    feasible: bool
    objective: int
    violations: list[ViolationModel]
    error: Optional[str] = None


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: Literal["tiny", "desk", "paper"] = "tiny"
    scenario: Optional[Literal["sc1", "sc2", "sc3"]] = None
    demands: Optional[int] = Field(default=None, ge=0)
    seed: int = 0
    R: Optional[int] = Field(default=None, ge=0)


class SessionCreate(BaseModel):
    """An online admission session over a fixed network; demands arrive later."""

    instance: InstanceModel
    k: Optional[int] = Field(default=None, ge=1)
    epsilon: float = Field(default=EPSILON, gt=0)


class SessionState(BaseModel):
    id: str
    admitted: int
    rejected: int
    accepted_traffic_pct: float
    solution: SolutionModel


class AdmitRequest(BaseModel):
    demand: DemandModel


class AdmitResponse(BaseModel):
    demand: str
    accepted: bool
    path: Optional[AssignmentModel] = None


class ErrorResponse(BaseModel):
    error: str
    detail: str
