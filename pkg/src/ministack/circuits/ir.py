"""Core circuit IR: two levels (generic and device-native), immutable after construction.

Qubit 0 is the least-significant bit of basis-state indices throughout the stack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Level(Enum):
    GENERIC = "generic"
    NATIVE = "native"


class LevelError(ValueError):
    """Circuit or operation violates the rules of its IR level."""


# Generic gate set: name -> (num_qubits, num_params). barrier/measure are structural
# and handled separately.
GENERIC_GATES: dict[str, tuple[int, int]] = {
    "id": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "h": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "cx": (2, 0),
    "cz": (2, 0),
    "swap": (2, 0),
}

# Arities of every gate name the stack knows about (generic plus the built-in
# device-native gates). Custom native gates of third-party devices are checked
# against the device's own declaration instead.
KNOWN_GATE_ARITIES: dict[str, tuple[int, int]] = {
    **GENERIC_GATES,
    "prx": (1, 2),
    "rxx": (2, 1),
}

BARRIER = "barrier"
MEASURE = "measure"


@dataclass(frozen=True)
class GateOp:
    """One instruction: a gate name, real parameters, qubit operands, and for
    measure ops the classical bit written."""

    name: str
    params: tuple[float, ...] = ()
    qubits: tuple[int, ...] = ()
    clbits: tuple[int, ...] = ()

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit operand in {self.name}: {self.qubits}")
        for p in self.params:
            if not math.isfinite(p):
                raise ValueError(f"non-finite parameter {p!r} in {self.name}")
        if self.name == MEASURE:
            if len(self.qubits) != 1 or len(self.clbits) != 1:
                raise ValueError("measure takes exactly one qubit and one classical bit")
        elif self.clbits:
            raise ValueError(f"{self.name} takes no classical bits")
        arity = KNOWN_GATE_ARITIES.get(self.name)
        if arity is not None:
            nq, npar = arity
            if len(self.qubits) != nq:
                raise ValueError(f"{self.name} takes {nq} qubit(s), got {len(self.qubits)}")
            if len(self.params) != npar:
                raise ValueError(f"{self.name} takes {npar} parameter(s), got {len(self.params)}")
        elif self.name not in (BARRIER, MEASURE):
            raise ValueError(f"unknown gate {self.name!r}")

    @property
    def is_measure(self) -> bool:
        return self.name == MEASURE

    @property
    def is_barrier(self) -> bool:
        return self.name == BARRIER


@dataclass(frozen=True)
class QuantumCircuit:
    """An ordered gate list at one IR level.

    GENERIC circuits use logical qubit indices and only the generic gate set.
    NATIVE circuits use physical qubit indices of a concrete device and carry a
    layout: an injective map from logical wire index to physical qubit. Routing
    may extend the layout with ancilla wire indices (>= the original width) so
    the map stays a bijection onto the physical qubits the ops touch.
    """

    level: Level
    num_qubits: int
    num_clbits: int
    ops: tuple[GateOp, ...] = ()
    layout: dict[int, int] | None = None
    device_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise ValueError("register sizes must be non-negative")
        if self.level is Level.GENERIC:
            if self.layout is not None:
                raise LevelError("GENERIC circuits carry no layout")
        else:
            if self.layout is None:
                raise LevelError("NATIVE circuits require a layout")
            values = list(self.layout.values())
            if len(set(values)) != len(values):
                raise ValueError("layout must be injective")
            for phys in values:
                if not 0 <= phys < self.num_qubits:
                    raise ValueError(f"layout target {phys} outside physical register")
            touched = {q for op in self.ops for q in op.qubits if not op.is_barrier}
            if not touched <= set(values):
                raise ValueError("layout must cover every physical qubit the ops touch")
        written: set[int] = set()
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"qubit {q} out of range in {op.name}")
            for c in op.clbits:
                if not 0 <= c < self.num_clbits:
                    raise ValueError(f"classical bit {c} out of range in {op.name}")
            if op.is_measure:
                c = op.clbits[0]
                if c in written:
                    raise ValueError(f"classical bit {c} written by more than one measure")
                written.add(c)
            if self.level is Level.GENERIC and not op.is_barrier:
                if not op.is_measure and op.name not in GENERIC_GATES:
                    raise LevelError(f"{op.name} is not in the generic gate set")

    @property
    def width(self) -> int:
        return self.num_qubits

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for op in self.ops:
            counts[op.name] = counts.get(op.name, 0) + 1
        return counts

    def depth(self) -> int:
        """Number of layers when ops are packed as early as their operands allow.

        Barriers occupy a layer boundary on their qubits but do not count as a
        layer of work themselves.
        """
        frontier: dict[int, int] = {}
        depth = 0
        for op in self.ops:
            wires = op.qubits if op.qubits else tuple(range(self.num_qubits))
            start = max((frontier.get(q, 0) for q in wires), default=0)
            level = start if op.is_barrier else start + 1
            for q in wires:
                frontier[q] = level
            depth = max(depth, level)
        return depth

    def measured_qubits(self) -> dict[int, int]:
        """Map classical bit -> qubit it is written from."""
        return {op.clbits[0]: op.qubits[0] for op in self.ops if op.is_measure}

    def replace_ops(self, ops) -> "QuantumCircuit":
        return QuantumCircuit(
            level=self.level,
            num_qubits=self.num_qubits,
            num_clbits=self.num_clbits,
            ops=tuple(ops),
            layout=dict(self.layout) if self.layout is not None else None,
            device_id=self.device_id,
        )


def generic_circuit(num_qubits: int, num_clbits: int, ops=()) -> QuantumCircuit:
    return QuantumCircuit(Level.GENERIC, num_qubits, num_clbits, tuple(ops))


def native_circuit(num_qubits: int, num_clbits: int, ops, layout: dict[int, int],
                   device_id: str | None = None) -> QuantumCircuit:
    return QuantumCircuit(Level.NATIVE, num_qubits, num_clbits, tuple(ops),
                          layout=dict(layout), device_id=device_id)
