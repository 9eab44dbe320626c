"""Shared value types of the device management interface."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Protocol


@dataclass(frozen=True)
class DeviceProperties:
    """Static capabilities. native_gates maps gate name -> qubit arity;
    coupling_map holds undirected pairs as sorted tuples."""

    device_id: str
    display_name: str
    num_qubits: int
    native_gates: dict[str, int]
    coupling_map: tuple[tuple[int, int], ...]
    gate_durations: dict[str, float]
    shot_overhead: float
    setup_overhead: float

    def coupling_set(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(pair) for pair in self.coupling_map)


@dataclass(frozen=True)
class TelemetrySnapshot:
    """One refresh interval's calibration data. gate_fidelity is keyed by
    (gate name, qubit tuple); 2-qubit tuples are sorted ascending."""

    device_id: str
    taken_at: float
    gate_fidelity: dict[tuple[str, tuple[int, ...]], float]
    t1: dict[int, float]
    t2: dict[int, float]
    readout_fidelity: dict[int, float]
    confusion: dict[int, tuple[float, float]]
    temperature_mk: float
    calibrated_at: float

    def __post_init__(self):
        if self.taken_at < self.calibrated_at:
            raise ValueError("taken_at precedes calibrated_at")
        for key, value in self.gate_fidelity.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"gate fidelity out of range for {key}")
        for q, value in self.readout_fidelity.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"readout fidelity out of range for qubit {q}")
        for q, t2 in self.t2.items():
            t1 = self.t1.get(q)
            if t1 is not None and t2 > 2.0 * t1 + 1e-15:
                raise ValueError(f"t2 > 2*t1 for qubit {q}")


@dataclass(frozen=True)
class Counts:
    """Measurement outcome histogram: fixed-width bitstrings -> occurrences.

    Key width equals the number of measured classical bits; the lowest
    measured clbit is the rightmost character.
    """

    counts: dict[str, int]
    shots_total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots_total:
            raise ValueError("counts do not sum to shots_total")
        widths = {len(k) for k in self.counts}
        if len(widths) > 1:
            raise ValueError("bitstring keys must share one width")
        for key in self.counts:
            if set(key) - {"0", "1"}:
                raise ValueError(f"non-binary key {key!r}")


class JobState(Enum):
    RECEIVED = "RECEIVED"
    SCHEDULED = "SCHEDULED"
    COMPILED = "COMPILED"
    QUEUED = "QUEUED"
    RUNNING = "RUNNING"
    DONE = "DONE"
    FAILED = "FAILED"
    CANCELLED = "CANCELLED"


TERMINAL_STATES = frozenset({JobState.DONE, JobState.FAILED, JobState.CANCELLED})

_FORWARD = {
    JobState.RECEIVED: {JobState.SCHEDULED},
    JobState.SCHEDULED: {JobState.COMPILED},
    JobState.COMPILED: {JobState.QUEUED},
    JobState.QUEUED: {JobState.RUNNING},
    JobState.RUNNING: {JobState.DONE, JobState.FAILED},
}


def allowed_transition(src: JobState, dst: JobState) -> bool:
    """The lifecycle graph: a forward chain, FAILED reachable from any
    non-terminal (orchestration errors), CANCELLED from any non-terminal."""
    if src in TERMINAL_STATES:
        return False
    if dst in (JobState.CANCELLED, JobState.FAILED):
        return True
    return dst in _FORWARD.get(src, ())


@dataclass
class Session:
    session_id: str
    owner: str
    created_at: float
    open: bool = True


@dataclass
class JobRecord:
    """Mutable lifecycle record; the registry guards all mutation."""

    job_id: str
    session_id: str
    device_id: Optional[str]
    program: Optional[str]
    shots: int
    priority: int
    state: JobState
    seq: Optional[int] = None
    seed: Optional[int] = None
    timestamps: dict[str, float] = field(default_factory=dict)
    result: Optional[Counts] = None
    error: Optional[str] = None
    est_duration_s: float = 0.0
    cancel_event: Optional[threading.Event] = None

    def view(self) -> "JobRecord":
        """Detached copy safe to hand out; the cancel handle stays private."""
        return JobRecord(
            job_id=self.job_id,
            session_id=self.session_id,
            device_id=self.device_id,
            program=self.program,
            shots=self.shots,
            priority=self.priority,
            state=self.state,
            seq=self.seq,
            seed=self.seed,
            timestamps=dict(self.timestamps),
            result=self.result,
            error=self.error,
            est_duration_s=self.est_duration_s,
            cancel_event=None,
        )


class DevicePlugin(Protocol):
    """Behavioral contract a backend implements to join the registry."""

    def static_properties(self) -> DeviceProperties: ...

    def telemetry(self, now: Optional[float] = None) -> TelemetrySnapshot: ...

    def execute(self, program: str, shots: int, seed: int,
                cancel: Optional[threading.Event] = None) -> Counts: ...
