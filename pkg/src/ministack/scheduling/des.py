"""Discrete-event simulation of one device queue under reservations.

Time is virtual: the queue gets a fake clock and is polled with
next_nowait(), so runs are exact and instant regardless of the simulated
horizon. The workload model covers the two shapes the reservation design
targets: independent one-shot jobs and a hybrid chain that alternates
quantum bursts with fixed classical gaps (the next burst arrives only after
the previous one finishes plus the gap).
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .queues import DeviceQueue, EmptyQueue


@dataclass(frozen=True)
class OneShot:
    """Independent job: arrives once, runs for duration seconds."""

    arrival: float
    duration: float
    session_id: str
    priority: int = 0
    job_id: str = ""


@dataclass(frozen=True)
class BurstChain:
    """Hybrid job: `count` quantum bursts; burst k+1 arrives gap_s after
    burst k completes (the classical part of the loop)."""

    first_arrival: float
    burst_s: float
    gap_s: float
    count: int
    session_id: str
    priority: int = 0


@dataclass(frozen=True)
class Window:
    start: float
    end: float
    session_id: str


@dataclass(frozen=True)
class Segment:
    """One contiguous execution on the device."""

    job_id: str
    session_id: str
    start: float
    end: float


class _Clock:
    def __init__(self, t: float = 0.0):
        self.t = t

    def __call__(self) -> float:
        return self.t


def simulate(workloads: Iterable[Union[OneShot, BurstChain]],
             reservations: Sequence[Window] = (),
             horizon: float = 1e6) -> list[Segment]:
    """Run the workload to completion (or horizon); returns executed segments."""
    clock = _Clock()
    queue = DeviceQueue("des", clock=clock)
    for window in reservations:
        queue.reserve(window.start, window.end, window.session_id)

    ids = itertools.count()
    arrivals: list[tuple[float, int, dict]] = []  # (time, tiebreak, job)
    chain_state: dict[str, dict] = {}

    def push_arrival(t: float, job: dict) -> None:
        heapq.heappush(arrivals, (t, next(ids), job))

    for w in workloads:
        if isinstance(w, OneShot):
            job_id = w.job_id or f"oneshot-{next(ids)}"
            push_arrival(w.arrival, {
                "job_id": job_id, "session": w.session_id,
                "duration": w.duration, "priority": w.priority})
        else:
            key = f"chain-{next(ids)}"
            chain_state[key] = {"left": w.count, "spec": w}
            if w.count > 0:
                push_arrival(w.first_arrival, {
                    "job_id": f"{key}-b0", "session": w.session_id,
                    "duration": w.burst_s, "priority": w.priority,
                    "chain": key, "index": 0})

    segments: list[Segment] = []
    busy_until: Optional[float] = None
    running: Optional[dict] = None

    def enqueue_due() -> None:
        while arrivals and arrivals[0][0] <= clock.t:
            _, _, job = heapq.heappop(arrivals)
            queue.enqueue(job["job_id"], job["priority"], job["session"],
                          job["duration"])
            job_table[job["job_id"]] = job

    job_table: dict[str, dict] = {}

    def finish_running() -> None:
        nonlocal busy_until, running
        job = running
        busy_until = None
        running = None
        chain = job.get("chain")
        if chain is None:
            return
        state = chain_state[chain]
        nxt = job["index"] + 1
        if nxt < state["spec"].count:
            spec = state["spec"]
            push_arrival(clock.t + spec.gap_s, {
                "job_id": f"{chain}-b{nxt}", "session": spec.session_id,
                "duration": spec.burst_s, "priority": spec.priority,
                "chain": chain, "index": nxt})

    while clock.t <= horizon:
        enqueue_due()
        if running is None:
            while True:
                try:
                    entry = queue.next_nowait()
                except EmptyQueue:
                    break
                job = job_table[entry.job_id]
                end = clock.t + job["duration"]
                segments.append(Segment(job["job_id"], job["session"],
                                        clock.t, end))
                if job["duration"] <= 0.0:
                    running = job
                    finish_running()  # instant job frees the device in place
                    continue
                running = job
                busy_until = end
                break

        candidates = []
        if busy_until is not None:
            candidates.append(busy_until)
        if arrivals:
            candidates.append(arrivals[0][0])
        if running is None and queue.pending():
            # blocked by a reservation: the next boundary can unblock it
            for res in queue.reservations():
                for t in (res.start, res.end):
                    if t > clock.t:
                        candidates.append(t)
        if not candidates:
            break
        clock.t = min(candidates)
        if busy_until is not None and clock.t >= busy_until:
            clock.t = busy_until
            finish_running()

    queue.close()
    return segments


def busy_fraction(segments: Sequence[Segment],
                  windows: Sequence[Window]) -> float:
    """Share of the windows' total length the device spent executing."""
    total = sum(w.end - w.start for w in windows)
    if total <= 0:
        raise ValueError("windows have no length")
    busy = 0.0
    for seg in segments:
        for w in windows:
            busy += max(0.0, min(seg.end, w.end) - max(seg.start, w.start))
    return busy / total


def hybrid_reservation_workload() -> tuple[list, list[Window]]:
    """Canonical scenario: one long batch job landing just before a hybrid
    loop of three 0.5 s bursts separated by 1 s of classical work, with
    reservation windows matching the bursts."""
    windows = [Window(10.0, 10.5, "hybrid"),
               Window(11.5, 12.0, "hybrid"),
               Window(13.0, 13.5, "hybrid")]
    workloads = [
        OneShot(arrival=9.7, duration=1.0, session_id="batch", job_id="batch-0"),
        BurstChain(first_arrival=10.0, burst_s=0.5, gap_s=1.0, count=3,
                   session_id="hybrid"),
    ]
    return workloads, windows
