"""HTTP front end of the planner: batch solving, validation, generation and online admission."""

from __future__ import annotations

import threading
import uuid
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from ..greedy import OnlineAdmission
from ..instances import GenerationError, generate_instance, preset
from ..io import instance_from_dict, instance_to_dict, solution_paths_from_dict, solution_to_dict, spath_to_dict
from ..metrics import accepted_traffic_pct
from ..model import Demand, ModelError
from ..oracle import OracleLimitError
from ..runner import ConfigError, SolveConfig, solve
from ..validator import StructureError, validate
from .schemas import (
    AdmitRequest,
    AdmitResponse,
    ErrorResponse,
    GenerateRequest,
    InstanceModel,
    SessionCreate,
    SessionState,
    SolveRequest,
    SolveResponse,
    ValidateRequest,
    ValidateResponse,
)


class _Session:
    def __init__(self, online: OnlineAdmission):
        self.online = online
        self.lock = threading.Lock()


def _demand(doc: Any) -> Demand:
    return Demand(
        id=doc.id,
        source=doc.src,
        target=doc.dst,
        pattern=tuple(doc.pattern),
        deadline=doc.deadline_cycles,
        packet_size=doc.packet_size_du,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="csqf-planner", version="0.1.0")
    sessions: dict[str, _Session] = {}
    app.state.sessions = sessions

    def bad_input(request: Request, exc: Exception) -> JSONResponse:
        body = ErrorResponse(error=type(exc).__name__, detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    for exc_type in (ModelError, GenerationError, ConfigError, OracleLimitError):
        app.add_exception_handler(exc_type, bad_input)

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/generate", response_model=InstanceModel)
    def generate(req: GenerateRequest) -> dict[str, Any]:
        overrides: dict[str, Any] = {"seed": req.seed}
        if req.scenario is not None:
            overrides["scenario"] = req.scenario
        if req.demands is not None:
            overrides["demand_count"] = req.demands
        if req.R is not None:
            overrides["R"] = req.R
        return instance_to_dict(generate_instance(preset(req.preset, **overrides)))

    @app.post("/solve", response_model=SolveResponse)
    def solve_endpoint(req: SolveRequest) -> dict[str, Any]:
        instance = instance_from_dict(req.instance.model_dump())
        solution, metrics = solve(instance, SolveConfig(**req.options.model_dump()))
        return {"solution": solution_to_dict(solution), "metrics": metrics}

    @app.post("/oracle", response_model=SolveResponse)
    def oracle_endpoint(req: SolveRequest) -> dict[str, Any]:
        instance = instance_from_dict(req.instance.model_dump())
        options = req.options.model_dump() | {"algorithm": "oracle"}
        solution, metrics = solve(instance, SolveConfig(**options))
        return {"solution": solution_to_dict(solution), "metrics": metrics}

    @app.post("/validate", response_model=ValidateResponse)
    def validate_endpoint(req: ValidateRequest) -> dict[str, Any]:
        instance = instance_from_dict(req.instance.model_dump())
        paths = solution_paths_from_dict(req.solution.model_dump())
        try:
            return validate(instance, paths).to_dict()
        except StructureError as exc:
            return {"feasible": False, "objective": 0, "violations": [], "error": str(exc)}

    def _state(sid: str, session: _Session) -> dict[str, Any]:
        online = session.online
        solution = online.solution()
        return {
            "id": sid,
            "admitted": len(solution.accepted),
            "rejected": len(online.rejected),
            "accepted_traffic_pct": accepted_traffic_pct(online.instance, solution),
            "solution": solution_to_dict(solution),
        }

    def _session(sid: str) -> _Session:
        try:
            return sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}") from None

    @app.post("/sessions", response_model=SessionState, status_code=201)
    def create_session(req: SessionCreate) -> dict[str, Any]:
        instance = instance_from_dict(req.instance.model_dump())
        sid = uuid.uuid4().hex
        sessions[sid] = _Session(OnlineAdmission(instance, req.k, req.epsilon))
        return _state(sid, sessions[sid])

    @app.get("/sessions/{sid}", response_model=SessionState)
    def get_session(sid: str) -> dict[str, Any]:
        session = _session(sid)
        with session.lock:
            return _state(sid, session)

    @app.post("/sessions/{sid}/admit", response_model=AdmitResponse)
    def admit_demand(sid: str, req: AdmitRequest) -> dict[str, Any]:
        session = _session(sid)
        demand = _demand(req.demand)
        with session.lock:
            path = session.online.offer(demand)
        return {
            "demand": demand.id,
            "accepted": path is not None,
            "path": spath_to_dict(path) if path is not None else None,
        }

    @app.delete("/sessions/{sid}", status_code=204)
    def close_session(sid: str) -> None:
        _session(sid)
        del sessions[sid]

    return app


app = create_app()
