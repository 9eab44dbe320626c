"""Program validation at the interface boundary: native gates + coupling."""
from __future__ import annotations

from ministack.circuits import Level, QuantumCircuit, parse_lowlevel
from ministack.circuits.lowlevel import LowlevelParseError

from .errors import ValidationError
from .types import DeviceProperties


def validate_circuit(circuit: QuantumCircuit, props: DeviceProperties) -> None:
    """Raise ValidationError unless the NATIVE circuit is legal for the device."""
    if circuit.level is not Level.NATIVE:
        raise ValidationError("programs must be at NATIVE level")
    if circuit.num_qubits > props.num_qubits:
        raise ValidationError(
            f"program uses {circuit.num_qubits} qubits, device has {props.num_qubits}")
    coupling = props.coupling_set()
    for op in circuit.ops:
        if op.is_barrier:
            continue
        for q in op.qubits:
            if q >= props.num_qubits:
                raise ValidationError(f"qubit {q} outside device ({props.num_qubits} qubits)")
        if op.is_measure:
            continue
        arity = props.native_gates.get(op.name)
        if arity is None:
            raise ValidationError(f"{op.name} is not native to {props.device_id}")
        if len(op.qubits) != arity:
            raise ValidationError(f"{op.name} takes {arity} qubit(s) on {props.device_id}")
        if arity == 2 and frozenset(op.qubits) not in coupling:
            raise ValidationError(
                f"{op.name} on {op.qubits} violates the coupling map of {props.device_id}")


def validate_program(program: str, props: DeviceProperties) -> QuantumCircuit:
    """Parse low-level text and validate it; returns the parsed circuit."""
    try:
        circuit = parse_lowlevel(program)
    except LowlevelParseError as exc:
        raise ValidationError(f"program does not parse: {exc}") from exc
    if circuit.device_id is not None and circuit.device_id != props.device_id:
        raise ValidationError(
            f"program targets {circuit.device_id!r}, submitted to {props.device_id!r}")
    validate_circuit(circuit, props)
    return circuit
