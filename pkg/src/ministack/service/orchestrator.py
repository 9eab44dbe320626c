"""End-to-end job orchestration: accept, schedule, compile, enqueue, package.

The orchestrator owns no device state; everything lives in the registry and
its queues. Each accepted submission runs through the pipeline on its own
thread, so submit() returns as soon as the job record exists. Failures after
acceptance never raise to the caller; they land in the job record as FAILED.
"""
from __future__ import annotations

import copy
import ipaddress
import json
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional

from ministack.circuits import QuantumCircuit, parse_circuit
from ministack.compiler import CompileStats, compile_circuit
from ministack.devices.core import DeviceRegistry
from ministack.devices.errors import (
    AlreadyTerminal,
    IllegalTransition,
    UnknownJob,
)
from ministack.devices.types import JobState, TelemetrySnapshot
from ministack.devices.validate import validate_program
from ministack.fomac import (
    MeritReport,
    aggregate,
    estimate_success_probability,
)
from ministack.scheduling.estimates import estimate_execution_time
from ministack.scheduling.selection import (
    DeviceCandidate,
    NoHealthyDevice,
    SchedulingPolicy,
    select_device,
)

from .config import ServiceConfig
from .mitigation import SingularConfusion, confusions_for, mitigated_histogram, raw_histogram

ORIGIN_LOCAL = "LOCAL"
ORIGIN_REMOTE = "REMOTE"

_LOST_ERROR = "job lost on service restart"


@dataclass(frozen=True)
class SubmissionRequest:
    """One parsed submission; origin is derived from the connection, never
    taken from the client body."""

    circuit_text: str
    shots: int
    priority: int = 0
    policy: Optional[SchedulingPolicy] = None
    device_override: Optional[str] = None
    mitigate_readout: bool = False
    seed: Optional[int] = None
    origin: str = ORIGIN_REMOTE

    def __post_init__(self):
        if self.origin not in (ORIGIN_LOCAL, ORIGIN_REMOTE):
            raise ValueError(f"origin must be LOCAL or REMOTE, got {self.origin!r}")


@dataclass
class _JobContext:
    origin: str
    mitigate: bool
    policy: SchedulingPolicy
    seed: int
    stats: Optional[CompileStats] = None
    calibrated_at: Optional[float] = None
    confusions: list[tuple[float, float]] = field(default_factory=list)


def _stats_dict(stats: CompileStats) -> dict:
    d = asdict(stats)
    d["pipeline"] = list(stats.pipeline)
    d["initial_layout"] = [list(pair) for pair in stats.initial_layout]
    return d


def _merit_dict(report: MeritReport) -> dict:
    return {
        "taken_at": report.taken_at,
        "avg_fidelity_1q": report.avg_fidelity_1q,
        "avg_fidelity_2q": report.avg_fidelity_2q,
        "avg_readout_fidelity": report.avg_readout_fidelity,
        "qubit_ranking": list(report.qubit_ranking),
        "healthy": report.healthy,
        "health_reasons": list(report.health_reasons),
    }


def _snapshot_dict(snap: TelemetrySnapshot) -> dict:
    return {
        "device_id": snap.device_id,
        "taken_at": snap.taken_at,
        "calibrated_at": snap.calibrated_at,
        "temperature_mk": snap.temperature_mk,
        "gate_fidelity": [
            {"gate": name, "qubits": list(qubits), "fidelity": f}
            for (name, qubits), f in sorted(snap.gate_fidelity.items())
        ],
        "t1": {str(q): v for q, v in snap.t1.items()},
        "t2": {str(q): v for q, v in snap.t2.items()},
        "readout_fidelity": {str(q): v for q, v in snap.readout_fidelity.items()},
        "confusion": {str(q): list(pair) for q, pair in snap.confusion.items()},
    }


class Orchestrator:
    def __init__(self, registry: DeviceRegistry, config: ServiceConfig = ServiceConfig(),
                 *, synchronous: bool = False):
        self._registry = registry
        self._config = config
        self._sync = synchronous
        self._lock = threading.Lock()
        self._contexts: dict[str, _JobContext] = {}
        self._envelopes: dict[str, dict] = {}
        self._lost: dict[str, dict] = {}
        self._log_fh = None
        if config.job_log_path:
            self._replay_log(config.job_log_path)
            self._log_fh = open(config.job_log_path, "a", encoding="utf-8")

    # -- persistence ---------------------------------------------------------

    def _replay_log(self, path: str) -> None:
        """Accepted-but-unfinished work does not survive a restart; every
        logged job resurfaces as FAILED so clients get an answer, not limbo."""
        if not os.path.exists(path):
            return
        now = time.time()
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._lost[entry["job_id"]] = {
                    "job_id": entry["job_id"],
                    "state": JobState.FAILED.value,
                    "device_id": None,
                    "shots": entry.get("shots"),
                    "priority": entry.get("priority"),
                    "seed": entry.get("seed"),
                    "origin": entry.get("origin"),
                    "error": _LOST_ERROR,
                    "est_duration_s": 0.0,
                    "timestamps": {
                        JobState.RECEIVED.value: entry.get("received_at"),
                        JobState.FAILED.value: now,
                    },
                }

    def _log_accept(self, job_id: str, request: SubmissionRequest, seed: int) -> None:
        if self._log_fh is None:
            return
        entry = {
            "job_id": job_id,
            "received_at": time.time(),
            "shots": request.shots,
            "priority": request.priority,
            "origin": request.origin,
            "seed": seed,
        }
        with self._lock:
            self._log_fh.write(json.dumps(entry) + "\n")
            self._log_fh.flush()

    # -- sessions -------------------------------------------------------------

    def open_session(self, token: str) -> str:
        return self._registry.session_open(token).session_id

    def close_session(self, session_id: str) -> None:
        self._registry.session_close(session_id)

    def session_active(self, session_id: str) -> bool:
        return self._registry.session_active(session_id)

    # -- origin ----------------------------------------------------------------

    def detect_origin(self, source_ip: Optional[str],
                      headers: Mapping[str, str] = ()) -> str:
        header = self._config.gateway_header.lower()
        if any(k.lower() == header for k in headers):
            return ORIGIN_LOCAL
        if source_ip:
            try:
                addr = ipaddress.ip_address(source_ip)
            except ValueError:
                return ORIGIN_REMOTE
            for cidr in self._config.local_cidrs:
                if addr in ipaddress.ip_network(cidr):
                    return ORIGIN_LOCAL
        return ORIGIN_REMOTE

    # -- submission --------------------------------------------------------------

    def _candidates(self, circuit: QuantumCircuit, shots: int,
                    pool: Optional[set[str]] = None) -> list[DeviceCandidate]:
        out = []
        for device_id in self._registry.device_list():
            if pool is not None and device_id not in pool:
                continue
            props = self._registry.properties(device_id)
            snap = self._registry.snapshot(device_id)
            report = aggregate(props, snap, self._config.limits)
            out.append(DeviceCandidate(
                device_id=device_id,
                est_wait_s=self._registry.estimate_wait(device_id),
                esp=estimate_success_probability(circuit, snap),
                est_exec_s=estimate_execution_time(circuit, props, shots),
                healthy=report.healthy,
            ))
        return out

    def submit(self, session_id: str, request: SubmissionRequest) -> str:
        """Accept or reject synchronously; everything after RECEIVED is
        asynchronous and recorded on the job."""
        circuit = parse_circuit(request.circuit_text)
        policy = request.policy or self._config.default_policy
        priority = request.priority
        if request.origin == ORIGIN_LOCAL:
            priority = min(priority + 1, 9)

        candidates: list[DeviceCandidate] = []
        if request.device_override is not None:
            self._registry.properties(request.device_override)
        else:
            pool = set(policy.allow_list) if policy.allow_list is not None else None
            candidates = self._candidates(circuit, request.shots, pool)
            if not any(c.healthy for c in candidates):
                raise NoHealthyDevice("no healthy device for this submission")

        seed = request.seed if request.seed is not None else time.time_ns() % 2**31
        job_id = self._registry.job_create(session_id, request.shots, priority, seed)
        with self._lock:
            self._contexts[job_id] = _JobContext(
                origin=request.origin, mitigate=request.mitigate_readout,
                policy=policy, seed=seed)
        self._log_accept(job_id, request, seed)

        if self._sync:
            self._orchestrate(job_id, circuit, request, candidates, policy)
        else:
            threading.Thread(
                target=self._orchestrate,
                args=(job_id, circuit, request, candidates, policy),
                name=f"orchestrate-{job_id}", daemon=True).start()
        return job_id

    def _orchestrate(self, job_id: str, circuit: QuantumCircuit,
                     request: SubmissionRequest,
                     candidates: list[DeviceCandidate],
                     policy: SchedulingPolicy) -> None:
        try:
            if request.device_override is not None:
                device_id = request.device_override
            else:
                device_id = select_device(candidates, policy).device_id
            self._registry.advance(job_id, JobState.SCHEDULED, device_id=device_id)

            props = self._registry.properties(device_id)
            snapshot = self._registry.snapshot(device_id)
            program, stats, compiled = compile_circuit(circuit, props, snapshot)
            validate_program(program, props)  # compiler bugs fail the job here
            est = estimate_execution_time(compiled, props, request.shots)
            self._registry.advance(job_id, JobState.COMPILED,
                                   program=program, est_duration_s=est)
            with self._lock:
                ctx = self._contexts[job_id]
                ctx.stats = stats
                ctx.calibrated_at = snapshot.calibrated_at
                ctx.confusions = confusions_for(compiled, snapshot)
            self._registry.enqueue_compiled(job_id)
        except IllegalTransition:
            pass  # raced a cancel; the terminal record stands
        except Exception as exc:
            try:
                self._registry.advance(job_id, JobState.FAILED,
                                       error=f"{type(exc).__name__}: {exc}")
            except (IllegalTransition, UnknownJob):
                pass

    # -- job views ------------------------------------------------------------

    def job_view(self, job_id: str) -> dict:
        try:
            record = self._registry.job_record(job_id)
        except UnknownJob:
            with self._lock:
                lost = self._lost.get(job_id)
            if lost is None:
                raise
            return copy.deepcopy(lost)
        with self._lock:
            ctx = self._contexts.get(job_id)
        return {
            "job_id": record.job_id,
            "state": record.state.value,
            "device_id": record.device_id,
            "shots": record.shots,
            "priority": record.priority,
            "seed": record.seed,
            "origin": ctx.origin if ctx else None,
            "error": record.error,
            "est_duration_s": record.est_duration_s,
            "timestamps": dict(record.timestamps),
        }

    def result_envelope(self, job_id: str) -> dict:
        with self._lock:
            if job_id in self._lost and job_id not in self._contexts:
                raise UnknownJob(job_id)  # record exists but its result is gone
            cached = self._envelopes.get(job_id)
        if cached is not None:
            return copy.deepcopy(cached)
        record = self._registry.job_record(job_id)
        counts = self._registry.job_result(job_id)
        with self._lock:
            ctx = self._contexts.get(job_id)

        histogram = raw_histogram(counts)
        mitigated = None
        mitigation_error = None
        if ctx is not None and ctx.mitigate:
            try:
                mitigated = mitigated_histogram(counts, ctx.confusions)
            except (SingularConfusion, ValueError) as exc:
                mitigation_error = f"{type(exc).__name__}: {exc}"

        metadata = {
            "device_id": record.device_id,
            "calibrated_at": ctx.calibrated_at if ctx else None,
            "compile_stats": _stats_dict(ctx.stats) if ctx and ctx.stats else None,
            "pipeline": list(ctx.stats.pipeline) if ctx and ctx.stats else None,
            "policy_weights": {
                "w_esp": ctx.policy.w_esp,
                "w_wait": ctx.policy.w_wait,
                "w_exec": ctx.policy.w_exec,
            } if ctx else None,
            "seed": record.seed,
            "origin": ctx.origin if ctx else None,
        }
        if mitigation_error is not None:
            metadata["mitigation_error"] = mitigation_error
        envelope = {
            "job_id": job_id,
            "shots": counts.shots_total,
            "counts": dict(counts.counts),
            "histogram": histogram,
            "mitigated_histogram": mitigated,
            "metadata": metadata,
        }
        with self._lock:
            self._envelopes[job_id] = envelope
        return copy.deepcopy(envelope)

    def cancel(self, job_id: str) -> dict:
        with self._lock:
            if job_id in self._lost:
                raise AlreadyTerminal(f"{job_id} is {JobState.FAILED.value}")
        self._registry.job_cancel(job_id)
        return self.job_view(job_id)

    def list_jobs(self, session_id: Optional[str] = None) -> list[dict]:
        views = [self.job_view(r.job_id) for r in self._registry.jobs(session_id)]
        if session_id is None:
            with self._lock:
                views.extend(copy.deepcopy(v) for v in self._lost.values())
        return sorted(views, key=lambda v: v["job_id"])

    # -- device views -----------------------------------------------------------

    def _device_summary(self, device_id: str) -> dict:
        props = self._registry.properties(device_id)
        snap = self._registry.snapshot(device_id)
        report = aggregate(props, snap, self._config.limits)
        return {
            "device_id": device_id,
            "display_name": props.display_name,
            "num_qubits": props.num_qubits,
            "native_gates": dict(props.native_gates),
            "coupling_map": [list(pair) for pair in props.coupling_map],
            "queue_length": self._registry.queue_length(device_id),
            "est_wait_s": self._registry.estimate_wait(device_id),
            "fomac": _merit_dict(report),
        }

    def list_devices(self) -> list[dict]:
        return [self._device_summary(d) for d in self._registry.device_list()]

    def device_detail(self, device_id: str) -> dict:
        props = self._registry.properties(device_id)
        summary = self._device_summary(device_id)
        summary.update({
            "gate_durations": dict(props.gate_durations),
            "shot_overhead": props.shot_overhead,
            "setup_overhead": props.setup_overhead,
        })
        return summary

    def device_telemetry(self, device_id: str) -> dict:
        return _snapshot_dict(self._registry.snapshot(device_id))

    def close(self) -> None:
        with self._lock:
            if self._log_fh is not None:
                self._log_fh.close()
                self._log_fh = None
