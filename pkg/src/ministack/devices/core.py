"""The device registry: sessions, job lifecycle, property queries, dispatch.

One internally synchronized hub per process. Each registered device gets its
own queue and one worker thread, so plugin execute() is never concurrent for
a device. All public operations are safe to call from many threads.
"""
from __future__ import annotations

import itertools
import threading
import time
import uuid
from typing import Callable, Iterable, Optional

from ministack.circuits import QuantumCircuit
from ministack.scheduling.estimates import estimate_execution_time
from ministack.scheduling.queues import DeviceQueue, Reservation

from .errors import (
    AlreadyClosed,
    AlreadyTerminal,
    AuthError,
    Cancelled,
    DuplicateDevice,
    IllegalTransition,
    InvalidProperties,
    LimitError,
    NotDone,
    UnknownDevice,
    UnknownJob,
    UnknownKey,
)
from .types import (
    Counts,
    DevicePlugin,
    DeviceProperties,
    JobRecord,
    JobState,
    Session,
    TelemetrySnapshot,
    TERMINAL_STATES,
    allowed_transition,
)
from .validate import validate_program

STATIC_KEYS = ("num_qubits", "native_gates", "coupling_map", "gate_durations",
               "shot_overhead", "setup_overhead")
DYNAMIC_KEYS = ("gate_fidelity", "t1", "t2", "readout_fidelity", "confusion",
                "temperature_mK", "calibrated_at")


class _DeviceEntry:
    def __init__(self, plugin: DevicePlugin, props: DeviceProperties,
                 queue: DeviceQueue):
        self.plugin = plugin
        self.props = props
        self.queue = queue
        self.worker: Optional[threading.Thread] = None
        self.running_job: Optional[str] = None
        self.running_since: float = 0.0
        self.running_est: float = 0.0


def _check_properties(props: DeviceProperties) -> None:
    if props.num_qubits <= 0:
        raise InvalidProperties("num_qubits must be positive")
    for gate, arity in props.native_gates.items():
        if arity not in (1, 2):
            raise InvalidProperties(f"unsupported arity {arity} for {gate}")
        if arity == 2 and gate not in props.gate_durations:
            raise InvalidProperties(f"2-qubit gate {gate} lacks a duration entry")
    for a, b in props.coupling_map:
        if not (0 <= a < props.num_qubits and 0 <= b < props.num_qubits) or a == b:
            raise InvalidProperties(f"coupling pair ({a}, {b}) references invalid qubits")


class DeviceRegistry:
    def __init__(self, allowed_tokens: Iterable[str], *,
                 clock: Callable[[], float] = time.time,
                 max_shots: int = 1_000_000, start_workers: bool = True):
        self._tokens = {t for t in allowed_tokens if t}
        self._clock = clock
        self._max_shots = max_shots
        self._start_workers = start_workers
        self._lock = threading.RLock()
        self._sessions: dict[str, Session] = {}
        self._devices: dict[str, _DeviceEntry] = {}
        self._jobs: dict[str, JobRecord] = {}
        self._log: list[tuple[str, Optional[JobState], JobState, float]] = []
        self._job_counter = itertools.count()
        self._stopping = False

    @classmethod
    def from_allowlist_file(cls, path: str, **kwargs) -> "DeviceRegistry":
        """Allow-list file: one token per line, blank lines ignored."""
        with open(path, encoding="utf-8") as f:
            tokens = [line.strip() for line in f if line.strip()]
        return cls(tokens, **kwargs)

    # -- sessions ---------------------------------------------------------

    def session_open(self, token: str) -> Session:
        if not token or token not in self._tokens:
            raise AuthError("unknown token")
        session = Session(session_id=uuid.uuid4().hex, owner=token,
                          created_at=self._clock())
        with self._lock:
            self._sessions[session.session_id] = session
        return Session(**vars(session))

    def session_close(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise AuthError("unknown session")
            if not session.open:
                raise AlreadyClosed(session_id)
            session.open = False
            jobs = [j.job_id for j in self._jobs.values()
                    if j.session_id == session_id and j.state not in TERMINAL_STATES]
        for job_id in jobs:
            try:
                self.job_cancel(job_id)
            except AlreadyTerminal:
                pass  # finished between snapshot and cancel

    def _require_session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None or not session.open:
            raise AuthError("session unknown or closed")
        return session

    def session_active(self, session_id: str) -> bool:
        with self._lock:
            session = self._sessions.get(session_id)
            return session is not None and session.open

    # -- devices ----------------------------------------------------------

    def register_device(self, plugin: DevicePlugin) -> str:
        props = plugin.static_properties()
        _check_properties(props)
        with self._lock:
            if props.device_id in self._devices:
                raise DuplicateDevice(props.device_id)
            if any(e.props.display_name == props.display_name
                   for e in self._devices.values()):
                raise DuplicateDevice(f"display name {props.display_name!r} taken")
            entry = _DeviceEntry(plugin, props,
                                 DeviceQueue(props.device_id, clock=self._clock))
            self._devices[props.device_id] = entry
            if self._start_workers:
                entry.worker = threading.Thread(
                    target=self._run_device, args=(entry,),
                    name=f"device-{props.device_id}", daemon=True)
                entry.worker.start()
        return props.device_id

    def device_list(self) -> list[str]:
        with self._lock:
            return sorted(self._devices)

    def _entry(self, device_id: str) -> _DeviceEntry:
        entry = self._devices.get(device_id)
        if entry is None:
            raise UnknownDevice(device_id)
        return entry

    def properties(self, device_id: str) -> DeviceProperties:
        return self._entry(device_id).props

    def snapshot(self, device_id: str) -> TelemetrySnapshot:
        return self._entry(device_id).plugin.telemetry(self._clock())

    def query_static(self, device_id: str, key: str):
        props = self.properties(device_id)
        if key not in STATIC_KEYS:
            raise UnknownKey(key)
        return {
            "num_qubits": props.num_qubits,
            "native_gates": dict(props.native_gates),
            "coupling_map": tuple(props.coupling_map),
            "gate_durations": dict(props.gate_durations),
            "shot_overhead": props.shot_overhead,
            "setup_overhead": props.setup_overhead,
        }[key]

    def query_dynamic(self, device_id: str, key: str):
        if key not in DYNAMIC_KEYS:
            raise UnknownKey(key)
        snap = self.snapshot(device_id)
        return {
            "gate_fidelity": dict(snap.gate_fidelity),
            "t1": dict(snap.t1),
            "t2": dict(snap.t2),
            "readout_fidelity": dict(snap.readout_fidelity),
            "confusion": dict(snap.confusion),
            "temperature_mK": snap.temperature_mk,
            "calibrated_at": snap.calibrated_at,
        }[key]

    # -- job table --------------------------------------------------------

    def _new_job_id(self) -> str:
        # time-prefixed so ids sort in submission order
        return f"{int(self._clock() * 1000):013d}-{next(self._job_counter):06d}"

    def _record_transition(self, job: JobRecord, src: Optional[JobState],
                           dst: JobState) -> None:
        now = self._clock()
        job.state = dst
        job.timestamps[dst.value] = now
        self._log.append((job.job_id, src, dst, now))

    def _transition(self, job: JobRecord, dst: JobState) -> None:
        if not allowed_transition(job.state, dst):
            raise IllegalTransition(f"{job.job_id}: {job.state.value} -> {dst.value}")
        self._record_transition(job, job.state, dst)

    def job_create(self, session_id: str, shots: int, priority: int,
                   seed: Optional[int] = None) -> str:
        """Orchestration entry point: a RECEIVED record with no device yet."""
        self._require_session(session_id)
        self._check_limits(shots, priority)
        with self._lock:
            job = JobRecord(job_id=self._new_job_id(), session_id=session_id,
                            device_id=None, program=None, shots=shots,
                            priority=priority, state=JobState.RECEIVED, seed=seed)
            self._jobs[job.job_id] = job
            self._record_transition(job, None, JobState.RECEIVED)
            return job.job_id

    def _check_limits(self, shots: int, priority: int) -> None:
        if not 1 <= shots <= self._max_shots:
            raise LimitError(f"shots must be in [1, {self._max_shots}]")
        if not 0 <= priority <= 9:
            raise LimitError("priority must be in [0, 9]")

    def job_submit(self, session_id: str, device_id: str, program: str,
                   shots: int, priority: int, seed: Optional[int] = None) -> str:
        """Device-level entry point: validate and enqueue directly as QUEUED."""
        self._require_session(session_id)
        entry = self._entry(device_id)
        self._check_limits(shots, priority)
        circuit = validate_program(program, entry.props)
        est = estimate_execution_time(circuit, entry.props, shots)
        with self._lock:
            job = JobRecord(job_id=self._new_job_id(), session_id=session_id,
                            device_id=device_id, program=program, shots=shots,
                            priority=priority, state=JobState.QUEUED, seed=seed,
                            est_duration_s=est)
            self._jobs[job.job_id] = job
            self._record_transition(job, None, JobState.QUEUED)
            job.seq = entry.queue.enqueue(job.job_id, priority, session_id, est)
            return job.job_id

    def advance(self, job_id: str, dst: JobState, *,
                device_id: Optional[str] = None, program: Optional[str] = None,
                error: Optional[str] = None,
                est_duration_s: Optional[float] = None) -> None:
        """Guarded transition with field updates (orchestration path)."""
        with self._lock:
            job = self._job(job_id)
            self._transition(job, dst)
            if device_id is not None:
                job.device_id = device_id
            if program is not None:
                job.program = program
            if error is not None:
                job.error = error
            if est_duration_s is not None:
                job.est_duration_s = est_duration_s

    def enqueue_compiled(self, job_id: str) -> None:
        """COMPILED -> QUEUED plus entry into the device queue."""
        with self._lock:
            job = self._job(job_id)
            if job.state is not JobState.COMPILED:
                raise IllegalTransition(f"{job_id}: enqueue from {job.state.value}")
            entry = self._entry(job.device_id)
            self._transition(job, JobState.QUEUED)
            job.seq = entry.queue.enqueue(job.job_id, job.priority,
                                          job.session_id, job.est_duration_s)

    def _job(self, job_id: str) -> JobRecord:
        job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(job_id)
        return job

    def job_status(self, job_id: str) -> JobState:
        with self._lock:
            return self._job(job_id).state

    def job_record(self, job_id: str) -> JobRecord:
        with self._lock:
            return self._job(job_id).view()

    def job_result(self, job_id: str) -> Counts:
        with self._lock:
            job = self._job(job_id)
            if job.state is not JobState.DONE:
                raise NotDone(f"{job_id} is {job.state.value}")
            return job.result

    def job_cancel(self, job_id: str) -> None:
        with self._lock:
            job = self._job(job_id)
            if job.state in TERMINAL_STATES:
                raise AlreadyTerminal(f"{job_id} is {job.state.value}")
            if job.state is JobState.RUNNING:
                # the worker observes the signal and finalizes the record
                if job.cancel_event is not None:
                    job.cancel_event.set()
                return
            if job.state is JobState.QUEUED and job.device_id is not None:
                self._entry(job.device_id).queue.remove(job_id)
            self._transition(job, JobState.CANCELLED)

    def jobs(self, session_id: Optional[str] = None) -> list[JobRecord]:
        with self._lock:
            records = [j.view() for j in self._jobs.values()
                       if session_id is None or j.session_id == session_id]
        return sorted(records, key=lambda j: j.job_id)

    def transition_log(self) -> list[tuple[str, Optional[JobState], JobState, float]]:
        with self._lock:
            return list(self._log)

    # -- queue metrics and reservations ------------------------------------

    def queue_length(self, device_id: str) -> int:
        return self._entry(device_id).queue.pending()

    def estimate_wait(self, device_id: str) -> float:
        """Work ahead of a new arrival: queued estimates plus the remaining
        share of the running job, floored at zero."""
        entry = self._entry(device_id)
        waiting = entry.queue.queued_duration()
        with self._lock:
            if entry.running_job is not None:
                elapsed = self._clock() - entry.running_since
                waiting += max(entry.running_est - elapsed, 0.0)
        return waiting

    def reserve(self, device_id: str, start: float, end: float,
                session_id: str) -> Reservation:
        self._require_session(session_id)
        return self._entry(device_id).queue.reserve(start, end, session_id)

    def release(self, reservation: Reservation) -> None:
        self._entry(reservation.device_id).queue.release(reservation)

    # -- dispatch -----------------------------------------------------------

    def _run_device(self, entry: _DeviceEntry) -> None:
        while not self._stopping:
            qentry = entry.queue.next(timeout=0.2)
            if qentry is None:
                continue
            self._execute_one(entry, qentry.job_id)

    def _execute_one(self, entry: _DeviceEntry, job_id: str) -> None:
        """Run one dequeued job to a terminal state. Used by the worker
        threads and by tests driving the queue manually."""
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.state is not JobState.QUEUED:
                return  # cancelled after dequeue; nothing to run
            self._transition(job, JobState.RUNNING)
            cancel = threading.Event()
            job.cancel_event = cancel
            entry.running_job = job.job_id
            entry.running_since = self._clock()
            entry.running_est = job.est_duration_s
            program, shots, seed = job.program, job.shots, job.seed
        outcome = None
        error = None
        cancelled = False
        try:
            outcome = entry.plugin.execute(program, shots, seed, cancel=cancel)
        except Cancelled:
            cancelled = True
        except Exception as exc:  # plugin failure -> FAILED, never limbo
            error = f"{type(exc).__name__}: {exc}"
        with self._lock:
            entry.running_job = None
            job.cancel_event = None
            if job.state is not JobState.RUNNING:
                return  # already finalized elsewhere; terminal absorbs
            if cancelled:
                self._transition(job, JobState.CANCELLED)
            elif error is not None:
                job.error = error
                self._transition(job, JobState.FAILED)
            else:
                job.result = outcome
                self._transition(job, JobState.DONE)

    def close(self) -> None:
        self._stopping = True
        with self._lock:
            entries = list(self._devices.values())
        for entry in entries:
            entry.queue.close()
        for entry in entries:
            if entry.worker is not None:
                entry.worker.join(timeout=5.0)
