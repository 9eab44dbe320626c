"""Execution-time prediction from circuit structure and device timing data."""
from __future__ import annotations

from typing import TYPE_CHECKING

from ministack.circuits import QuantumCircuit

if TYPE_CHECKING:  # runtime import would cycle through devices -> core -> here
    from ministack.devices.types import DeviceProperties


def _op_duration(name: str, nq: int, props: DeviceProperties) -> float:
    """Duration of one op. Gates without an entry fall back to the mean
    duration of same-arity native gates (lets estimates run on GENERIC
    circuits before compilation); barrier and measure default to zero."""
    d = props.gate_durations.get(name)
    if d is not None:
        return d
    if name in ("barrier", "measure"):
        return 0.0
    same_class = [props.gate_durations[g] for g, a in props.native_gates.items()
                  if a == nq and g in props.gate_durations]
    if same_class:
        return sum(same_class) / len(same_class)
    return 0.0


def critical_path_seconds(circuit: QuantumCircuit, props: DeviceProperties) -> float:
    """Sum over schedule layers of the longest gate in each layer.

    Layers pack ops as early as their operands allow, mirroring
    QuantumCircuit.depth(); barriers close layers without adding time.
    """
    frontier: dict[int, int] = {}
    layer_max: dict[int, float] = {}
    for op in circuit.ops:
        wires = op.qubits if op.qubits else tuple(range(circuit.num_qubits))
        start = max((frontier.get(q, 0) for q in wires), default=0)
        level = start if op.is_barrier else start + 1
        for q in wires:
            frontier[q] = level
        if not op.is_barrier:
            dur = _op_duration(op.name, len(op.qubits), props)
            layer_max[level] = max(layer_max.get(level, 0.0), dur)
    return sum(layer_max.values())


def estimate_execution_time(circuit: QuantumCircuit, props: DeviceProperties,
                            shots: int) -> float:
    """t = setup_overhead + shots * (critical_path + shot_overhead)."""
    if shots < 0:
        raise ValueError("shots must be non-negative")
    per_shot = critical_path_seconds(circuit, props) + props.shot_overhead
    return props.setup_overhead + shots * per_shot
