"""HTTP surface of the stack: a thin JSON mapping over the orchestrator.

Every route body delegates to one orchestrator call; domain exceptions map
to status codes in one table so the contract stays greppable:
400 parse/limits, 401 auth, 404 unknown ids, 409 state conflicts,
503 nothing healthy to run on.
"""
from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from ministack.circuits import (
    CircuitSyntaxError,
    LevelError,
    RegisterIndexError,
    UnsupportedGateError,
)
from ministack.devices.errors import (
    AlreadyClosed,
    AlreadyTerminal,
    AuthError,
    IllegalTransition,
    LimitError,
    NotDone,
    UnknownDevice,
    UnknownJob,
    UnknownKey,
    ValidationError,
)
from ministack.scheduling.selection import NoHealthyDevice, SchedulingPolicy

from .orchestrator import Orchestrator, SubmissionRequest

_STATUS = {
    CircuitSyntaxError: 400,
    UnsupportedGateError: 400,
    RegisterIndexError: 400,
    LevelError: 400,
    LimitError: 400,
    ValidationError: 400,
    ValueError: 400,
    AuthError: 401,
    UnknownJob: 404,
    UnknownDevice: 404,
    UnknownKey: 404,
    NotDone: 409,
    AlreadyTerminal: 409,
    AlreadyClosed: 409,
    IllegalTransition: 409,
    NoHealthyDevice: 503,
}


class _StrictBody(BaseModel):
    # unknown fields 400 instead of silently taking defaults; a typo like
    # "mitigate_readout" would otherwise submit with mitigation off
    model_config = ConfigDict(extra="forbid")


class SessionBody(_StrictBody):
    token: str


class PolicyBody(_StrictBody):
    w_esp: float
    w_wait: float
    w_exec: float
    allow_list: Optional[list[str]] = None


class JobBody(_StrictBody):
    circuit: str
    shots: int
    priority: int = 0
    policy: Optional[PolicyBody] = None
    device: Optional[str] = None
    mitigate: bool = False
    seed: Optional[int] = None


def create_app(orch: Orchestrator) -> FastAPI:
    app = FastAPI(title="ministack", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    for exc_type, status in _STATUS.items():
        def handler(request: Request, exc: Exception, status: int = status):
            return JSONResponse(
                status_code=status,
                content={"error": type(exc).__name__, "detail": str(exc)})
        app.add_exception_handler(exc_type, handler)

    @app.exception_handler(RequestValidationError)
    def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "RequestValidationError",
                                     "detail": str(exc.errors())})

    def require_session(authorization: Optional[str] = Header(None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise AuthError("missing bearer session header")
        session_id = authorization[len("Bearer "):].strip()
        if not orch.session_active(session_id):
            raise AuthError("session unknown or closed")
        return session_id

    @app.post("/v1/sessions")
    def open_session(body: SessionBody):
        return {"session_id": orch.open_session(body.token)}

    @app.post("/v1/jobs")
    def submit_job(body: JobBody, request: Request,
                   session_id: str = Depends(require_session)):
        policy = None
        if body.policy is not None:
            policy = SchedulingPolicy(
                w_esp=body.policy.w_esp, w_wait=body.policy.w_wait,
                w_exec=body.policy.w_exec,
                allow_list=tuple(body.policy.allow_list)
                if body.policy.allow_list is not None else None)
        origin = orch.detect_origin(
            request.client.host if request.client else None, request.headers)
        submission = SubmissionRequest(
            circuit_text=body.circuit, shots=body.shots, priority=body.priority,
            policy=policy, device_override=body.device,
            mitigate_readout=body.mitigate, seed=body.seed, origin=origin)
        return {"job_id": orch.submit(session_id, submission)}

    @app.get("/v1/jobs")
    def list_jobs(_: str = Depends(require_session)):
        return orch.list_jobs()

    @app.get("/v1/jobs/{job_id}")
    def job_view(job_id: str, _: str = Depends(require_session)):
        return orch.job_view(job_id)

    @app.get("/v1/jobs/{job_id}/result")
    def job_result(job_id: str, _: str = Depends(require_session)):
        return orch.result_envelope(job_id)

    @app.delete("/v1/jobs/{job_id}")
    def job_cancel(job_id: str, _: str = Depends(require_session)):
        return orch.cancel(job_id)

    @app.get("/v1/devices")
    def devices(_: str = Depends(require_session)):
        return orch.list_devices()

    @app.get("/v1/devices/{device_id}")
    def device_detail(device_id: str, _: str = Depends(require_session)):
        return orch.device_detail(device_id)

    @app.get("/v1/devices/{device_id}/telemetry")
    def device_telemetry(device_id: str, _: str = Depends(require_session)):
        return orch.device_telemetry(device_id)

    return app
