"""Device figures of merit: aggregates, qubit ranking, ESP, health gating.

Everything here reads one telemetry snapshot; nothing mutates device state.
ESP (estimated success probability) multiplies per-operation fidelities, so
it is monotonically non-increasing as a circuit grows.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from statistics import fmean
from typing import Optional

from ministack.circuits import QuantumCircuit
from ministack.devices.types import DeviceProperties, TelemetrySnapshot

MAX_TEMPERATURE_MK_DEFAULT = 60.0
MAX_CALIBRATION_AGE_S_DEFAULT = 24 * 3600.0


@dataclass(frozen=True)
class HealthLimits:
    max_temperature_mk: float = MAX_TEMPERATURE_MK_DEFAULT
    max_calibration_age_s: float = MAX_CALIBRATION_AGE_S_DEFAULT


@dataclass(frozen=True)
class MeritReport:
    device_id: str
    taken_at: float
    avg_fidelity_1q: float
    avg_fidelity_2q: float
    avg_readout_fidelity: float
    qubit_ranking: tuple[int, ...]
    healthy: bool
    health_reasons: tuple[str, ...]


def environment_health(snapshot: TelemetrySnapshot,
                       limits: HealthLimits = HealthLimits(),
                       now: Optional[float] = None) -> tuple[bool, tuple[str, ...]]:
    """Hard gates only; fidelity never makes a device unhealthy."""
    now = snapshot.taken_at if now is None else now
    reasons = []
    if snapshot.temperature_mk > limits.max_temperature_mk:
        reasons.append("temperature")
    if now - snapshot.calibrated_at > limits.max_calibration_age_s:
        reasons.append("calibration_age")
    return (not reasons, tuple(reasons))


def _one_qubit_fids(snapshot: TelemetrySnapshot, qubit: int) -> list[float]:
    return [f for (name, qubits), f in snapshot.gate_fidelity.items()
            if qubits == (qubit,)]


def qubit_ranking(snapshot: TelemetrySnapshot, num_qubits: int) -> tuple[int, ...]:
    """Qubits ordered best first by readout times mean single-qubit gate
    fidelity; ties resolve to the lower index."""
    def quality(q: int) -> float:
        own = _one_qubit_fids(snapshot, q)
        gate_part = fmean(own) if own else 1.0
        return snapshot.readout_fidelity.get(q, 1.0) * gate_part

    return tuple(sorted(range(num_qubits), key=lambda q: (-quality(q), q)))


def aggregate(props: DeviceProperties, snapshot: TelemetrySnapshot,
              limits: HealthLimits = HealthLimits(),
              now: Optional[float] = None) -> MeritReport:
    fids_1q = [f for (_, qubits), f in snapshot.gate_fidelity.items()
               if len(qubits) == 1]
    fids_2q = [f for (_, qubits), f in snapshot.gate_fidelity.items()
               if len(qubits) == 2]
    readout = list(snapshot.readout_fidelity.values())
    healthy, reasons = environment_health(snapshot, limits, now)
    return MeritReport(
        device_id=snapshot.device_id,
        taken_at=snapshot.taken_at,
        avg_fidelity_1q=fmean(fids_1q) if fids_1q else 1.0,
        avg_fidelity_2q=fmean(fids_2q) if fids_2q else 1.0,
        avg_readout_fidelity=fmean(readout) if readout else 1.0,
        qubit_ranking=qubit_ranking(snapshot, props.num_qubits),
        healthy=healthy,
        health_reasons=reasons,
    )


def _gate_fidelity(snapshot: TelemetrySnapshot, name: str,
                   qubits: tuple[int, ...]) -> float:
    exact = snapshot.gate_fidelity.get((name, qubits))
    if exact is None:
        exact = snapshot.gate_fidelity.get((name, tuple(sorted(qubits))))
    if exact is not None:
        return exact
    # fall back to the class average so pre-translation circuits and
    # uncharacterized placements still get a usable estimate
    same_name = [f for (n, _), f in snapshot.gate_fidelity.items() if n == name]
    if same_name:
        return fmean(same_name)
    same_arity = [f for (_, qs), f in snapshot.gate_fidelity.items()
                  if len(qs) == len(qubits)]
    if same_arity:
        return fmean(same_arity)
    return 1.0


def estimate_success_probability(circuit: QuantumCircuit,
                                 snapshot: TelemetrySnapshot) -> float:
    """Product of gate fidelities and, per measurement, readout fidelity."""
    esp = 1.0
    for op in circuit.ops:
        if op.is_barrier:
            continue
        if op.is_measure:
            esp *= snapshot.readout_fidelity.get(op.qubits[0], 1.0)
        else:
            esp *= _gate_fidelity(snapshot, op.name, op.qubits)
    return esp
