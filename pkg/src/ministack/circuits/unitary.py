"""Dense-matrix reference semantics for small circuits.

Conventions, shared by everything built on top:

  * qubit 0 is the least significant bit of a basis-state index;
  * a k-qubit gate's matrix is indexed with the first listed operand as the
    most significant bit, so cx = diag-block(I, X) with the control first;
  * a circuit's unitary composes ops in temporal order, U = M_k ... M_1.

Intended as a test oracle: capped at 12 qubits, no shortcuts, no sparsity.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .ir import BARRIER, MEASURE, GateOp, QuantumCircuit

MAX_ORACLE_QUBITS = 12


class TooLargeError(Exception):
    """Circuit exceeds the dense-oracle qubit cap."""


class MeasurePresentError(Exception):
    """Unitary semantics are undefined for circuits containing measure."""


class DimMismatchError(Exception):
    """Equivalence check received matrices of different shapes."""


_SQ2 = 1.0 / math.sqrt(2.0)

_FIXED: dict[str, np.ndarray] = {
    "id": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(0.25j * math.pi)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, np.exp(-0.25j * math.pi)]], dtype=complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Matrix of one gate in the convention above. Raises ValueError for
    measure/barrier or an unknown name."""
    if name in _FIXED:
        return _FIXED[name].copy()
    if name == "rx":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if name == "ry":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        (theta,) = params
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    if name == "prx":
        # Rotation by theta about the cos(phi) X + sin(phi) Y axis.
        theta, phi = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [[c, -1j * np.exp(-1j * phi) * s], [-1j * np.exp(1j * phi) * s, c]]
        )
    if name == "rxx":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        xx = np.fliplr(np.eye(4))
        return c * np.eye(4) - 1j * s * xx
    raise ValueError(f"no unitary for {name!r}")


def apply_ops(state: np.ndarray, ops: Iterable[GateOp], num_qubits: int) -> np.ndarray:
    """Apply unitary ops in temporal order to a (2**n,) or (2**n, batch) array.

    Barriers are skipped; measure ops raise MeasurePresentError. Returns a
    new array, input untouched.
    """
    batch = state.shape[1:]
    work = state.astype(complex).reshape((2,) * num_qubits + batch)
    for op in ops:
        if op.name == BARRIER:
            continue
        if op.name == MEASURE:
            raise MeasurePresentError("circuit contains measure")
        mat = gate_matrix(op.name, op.params)
        k = len(op.qubits)
        axes = [num_qubits - 1 - q for q in op.qubits]
        work = np.moveaxis(work, axes, range(k))
        shape = work.shape
        work = mat @ work.reshape(2**k, -1)
        work = np.moveaxis(work.reshape(shape), range(k), axes)
    return np.ascontiguousarray(work).reshape((2**num_qubits,) + batch)


def circuit_unitary(circuit: QuantumCircuit) -> np.ndarray:
    """Dense unitary of a measurement-free circuit, up to 12 qubits."""
    n = circuit.num_qubits
    if n > MAX_ORACLE_QUBITS:
        raise TooLargeError(f"{n} qubits exceeds the {MAX_ORACLE_QUBITS}-qubit oracle cap")
    return apply_ops(np.eye(2**n, dtype=complex), circuit.ops, n)


def unitary_equiv(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True when a and b agree up to global phase: |tr(a^H b)| / dim >= 1 - tol."""
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatchError(f"shapes {a.shape} and {b.shape}")
    overlap = abs(np.trace(a.conj().T @ b)) / a.shape[0]
    return bool(overlap >= 1.0 - tol)
