"""Circuit intermediate representation, text formats, and the dense-unitary oracle."""

from .ir import (
    GateOp,
    Level,
    QuantumCircuit,
    GENERIC_GATES,
    KNOWN_GATE_ARITIES,
    LevelError,
    generic_circuit,
    native_circuit,
)
from .qasm import parse_circuit, CircuitSyntaxError, UnsupportedGateError, RegisterIndexError
from .lowlevel import emit_lowlevel, parse_lowlevel
from .unitary import circuit_unitary, unitary_equiv, gate_matrix, TooLargeError, MeasurePresentError, DimMismatchError

__all__ = [
    "GateOp",
    "Level",
    "QuantumCircuit",
    "GENERIC_GATES",
    "KNOWN_GATE_ARITIES",
    "LevelError",
    "generic_circuit",
    "native_circuit",
    "parse_circuit",
    "CircuitSyntaxError",
    "UnsupportedGateError",
    "RegisterIndexError",
    "emit_lowlevel",
    "parse_lowlevel",
    "circuit_unitary",
    "unitary_equiv",
    "gate_matrix",
    "TooLargeError",
    "MeasurePresentError",
    "DimMismatchError",
]
