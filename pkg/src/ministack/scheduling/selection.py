"""Upper-level device selection: Pareto filtering then weighted scalarization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


class NoHealthyDevice(Exception):
    """Every candidate was unhealthy or filtered out."""


@dataclass(frozen=True)
class DeviceCandidate:
    """Per-device metric vector; all three criteria are minimized
    (success probability enters as 1 - esp)."""

    device_id: str
    est_wait_s: float
    esp: float
    est_exec_s: float
    healthy: bool = True

    def __post_init__(self):
        if not 0.0 <= self.esp <= 1.0:
            raise ValueError("esp must be in [0, 1]")
        if self.est_wait_s < 0 or self.est_exec_s < 0:
            raise ValueError("time estimates must be non-negative")

    def criteria(self) -> tuple[float, float, float]:
        return (self.est_wait_s, 1.0 - self.esp, self.est_exec_s)


@dataclass(frozen=True)
class SchedulingPolicy:
    """Scalarization weights (each >= 0, summing to 1) and an optional
    device allow-list."""

    w_esp: float = 0.5
    w_wait: float = 0.3
    w_exec: float = 0.2
    allow_list: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        for w in (self.w_esp, self.w_wait, self.w_exec):
            if w < 0:
                raise ValueError("weights must be non-negative")
        if abs(self.w_esp + self.w_wait + self.w_exec - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


def _dominates(a: DeviceCandidate, b: DeviceCandidate) -> bool:
    ca, cb = a.criteria(), b.criteria()
    return all(x <= y for x, y in zip(ca, cb)) and any(x < y for x, y in zip(ca, cb))


def pareto_front(candidates: Sequence[DeviceCandidate]) -> list[DeviceCandidate]:
    """All healthy candidates not dominated by another healthy candidate."""
    healthy = [c for c in candidates if c.healthy]
    if not healthy:
        raise NoHealthyDevice("no healthy candidate")
    return [c for c in healthy
            if not any(_dominates(other, c) for other in healthy if other is not c)]


def _normalizer(values: list[float]):
    lo, hi = min(values), max(values)
    if hi - lo <= 0.0:
        return lambda v: 0.0  # constant criterion carries no information
    return lambda v: (v - lo) / (hi - lo)


def select_device(candidates: Sequence[DeviceCandidate],
                  policy: SchedulingPolicy = SchedulingPolicy()) -> DeviceCandidate:
    """Pick the front member minimizing the weighted normalized score;
    ties fall to the lexicographically smallest device_id."""
    pool = candidates
    if policy.allow_list is not None:
        allowed = set(policy.allow_list)
        pool = [c for c in candidates if c.device_id in allowed]
    front = pareto_front(pool)
    norm_wait = _normalizer([c.est_wait_s for c in front])
    norm_def = _normalizer([1.0 - c.esp for c in front])
    norm_exec = _normalizer([c.est_exec_s for c in front])

    def score(c: DeviceCandidate) -> float:
        return (policy.w_esp * norm_def(1.0 - c.esp)
                + policy.w_wait * norm_wait(c.est_wait_s)
                + policy.w_exec * norm_exec(c.est_exec_s))

    return min(front, key=lambda c: (score(c), c.device_id))
