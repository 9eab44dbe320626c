"""Per-device priority queue with reservation windows.

Dequeue order is (-priority, seq): higher priority first, FIFO within a
priority. Priorities are user-fixed; there is no aging, so a stream of
high-priority work can starve lower priorities indefinitely.

Reservations grant a session exclusive use of the device for a time window.
next() never starts a foreign job that would overlap a reservation window,
neither from inside the window nor by running into it (the drain rule), so
the device is idle and ready when the reserved burst arrives.
"""
from __future__ import annotations

import heapq
import itertools
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional


class EmptyQueue(Exception):
    """next_nowait() found no startable entry."""


class OverlapError(ValueError):
    """Requested reservation window overlaps an existing one."""


@dataclass(frozen=True)
class QueueEntry:
    job_id: str
    priority: int
    seq: int
    session_id: str
    est_duration_s: float

    def sort_key(self) -> tuple[int, int]:
        return (-self.priority, self.seq)


@dataclass(frozen=True)
class Reservation:
    reservation_id: str
    device_id: str
    start: float
    end: float
    session_id: str


class DeviceQueue:
    """Thread-safe queue for one device; many producers, one consumer."""

    def __init__(self, device_id: str, clock: Callable[[], float] = time.time):
        self.device_id = device_id
        self._clock = clock
        self._cv = threading.Condition()
        self._heap: list[tuple[tuple[int, int], QueueEntry]] = []
        self._removed: set[str] = set()
        self._seq = itertools.count()
        self._reservations: list[Reservation] = []
        self._res_counter = itertools.count()
        self._closed = False

    def enqueue(self, job_id: str, priority: int, session_id: str,
                est_duration_s: float = 0.0) -> int:
        """Returns the entry's seq, strictly increasing per device."""
        if not 0 <= priority <= 9:
            raise ValueError("priority must be in [0, 9]")
        with self._cv:
            if self._closed:
                raise RuntimeError("queue closed")
            seq = next(self._seq)
            entry = QueueEntry(job_id, priority, seq, session_id, est_duration_s)
            heapq.heappush(self._heap, (entry.sort_key(), entry))
            self._cv.notify_all()
            return seq

    def remove(self, job_id: str) -> bool:
        """Lazily drop a queued entry (cancellation support)."""
        with self._cv:
            present = any(e.job_id == job_id for _, e in self._heap
                          if e.job_id not in self._removed)
            if present:
                self._removed.add(job_id)
            return present

    def _blocked(self, entry: QueueEntry, now: float) -> bool:
        est = max(entry.est_duration_s, 0.0)
        for res in self._reservations:
            if res.session_id == entry.session_id:
                continue
            if now >= res.end:
                continue
            if now >= res.start or now + est > res.start:
                return True
        return False

    def _prune(self, now: float) -> None:
        self._reservations = [r for r in self._reservations if r.end > now]

    def _pop_startable(self, now: float) -> Optional[QueueEntry]:
        skipped = []
        found = None
        while self._heap:
            key, entry = heapq.heappop(self._heap)
            if entry.job_id in self._removed:
                self._removed.discard(entry.job_id)
                continue
            if self._blocked(entry, now):
                skipped.append((key, entry))
                continue
            found = entry
            break
        for item in skipped:
            heapq.heappush(self._heap, item)
        return found

    def next_nowait(self) -> QueueEntry:
        with self._cv:
            now = self._clock()
            self._prune(now)
            entry = self._pop_startable(now)
            if entry is None:
                raise EmptyQueue(self.device_id)
            return entry

    def next(self, timeout: Optional[float] = None) -> Optional[QueueEntry]:
        """Block until a startable entry is available; None on timeout/close.

        Waits are bounded by the nearest reservation boundary so drained or
        expiring windows are re-evaluated promptly.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cv:
            while True:
                now = self._clock()
                self._prune(now)
                entry = self._pop_startable(now)
                if entry is not None:
                    return entry
                if self._closed:
                    return None
                wait = None if deadline is None else deadline - time.monotonic()
                if wait is not None and wait <= 0:
                    return None
                boundary = self._next_boundary(now)
                if boundary is not None:
                    wait = boundary if wait is None else min(wait, boundary)
                    wait = max(wait, 0.01)
                self._cv.wait(wait)

    def _next_boundary(self, now: float) -> Optional[float]:
        deltas = [t - now for res in self._reservations
                  for t in (res.start, res.end) if t > now]
        return min(deltas) if deltas else None

    def reserve(self, start: float, end: float, session_id: str) -> Reservation:
        if end <= start:
            raise ValueError("reservation window must have positive length")
        with self._cv:
            for res in self._reservations:
                if start < res.end and res.start < end:
                    raise OverlapError(
                        f"window [{start}, {end}) overlaps [{res.start}, {res.end})")
            reservation = Reservation(
                f"{self.device_id}-r{next(self._res_counter)}",
                self.device_id, start, end, session_id)
            self._reservations.append(reservation)
            self._cv.notify_all()
            return reservation

    def release(self, reservation: Reservation) -> None:
        with self._cv:
            self._reservations = [r for r in self._reservations
                                  if r.reservation_id != reservation.reservation_id]
            self._cv.notify_all()

    def reservations(self) -> list[Reservation]:
        with self._cv:
            return list(self._reservations)

    def pending(self) -> int:
        with self._cv:
            return sum(1 for _, e in self._heap if e.job_id not in self._removed)

    def queued_duration(self) -> float:
        """Sum of estimated durations of all pending entries."""
        with self._cv:
            return sum(e.est_duration_s for _, e in self._heap
                       if e.job_id not in self._removed)

    def close(self) -> None:
        with self._cv:
            self._closed = True
            self._cv.notify_all()
