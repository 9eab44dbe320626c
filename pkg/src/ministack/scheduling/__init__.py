"""Two-level scheduling: device selection over candidate metrics, and one
priority queue per device with reservation windows."""
from .estimates import critical_path_seconds, estimate_execution_time
from .queues import DeviceQueue, EmptyQueue, OverlapError, QueueEntry, Reservation
from .selection import (
    DeviceCandidate,
    NoHealthyDevice,
    SchedulingPolicy,
    pareto_front,
    select_device,
)

__all__ = [
    "critical_path_seconds",
    "estimate_execution_time",
    "DeviceQueue",
    "EmptyQueue",
    "OverlapError",
    "QueueEntry",
    "Reservation",
    "DeviceCandidate",
    "NoHealthyDevice",
    "SchedulingPolicy",
    "pareto_front",
    "select_device",
]
