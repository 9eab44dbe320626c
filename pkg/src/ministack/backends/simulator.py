"""Dense statevector execution of native programs with seeded sampling.

Only the qubits a program touches are simulated; physical indices are packed
into a compact register. Gate application works by explicit basis-index
arithmetic, intentionally distinct from the moveaxis-based test oracle in
ministack.circuits.unitary so the two can check each other.

Sampling draws one cumulative-inversion sample per shot from the final
statevector; optional readout noise then flips each measured bit with the
probability given by its confusion entry. Everything is deterministic for a
fixed (program, shots, seed).
"""
from __future__ import annotations

import cmath
import math
import threading
from typing import Optional

import numpy as np

from ministack.circuits import QuantumCircuit, parse_lowlevel
from ministack.devices.errors import Cancelled, ValidationError
from ministack.devices.types import Counts

MAX_SIM_QUBITS = 24

_CANCEL_CHECK_EVERY = 8  # ops between cancellation polls

_INV_SQRT2 = 2.0**-0.5


def _matrix(name: str, params: tuple[float, ...]) -> np.ndarray:
    """Simulator-local gate table (kept separate from the test oracle)."""
    if name == "id":
        return np.eye(2, dtype=complex)
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if name == "z":
        return np.diag([1.0, -1.0]).astype(complex)
    if name == "h":
        return np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]],
                        dtype=complex)
    if name == "s":
        return np.diag([1.0, 1j])
    if name == "sdg":
        return np.diag([1.0, -1j])
    if name == "t":
        return np.diag([1.0, cmath.exp(0.25j * math.pi)])
    if name == "tdg":
        return np.diag([1.0, cmath.exp(-0.25j * math.pi)])
    if name == "rx":
        (th,) = params
        c, s = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if name == "ry":
        (th,) = params
        c, s = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        (th,) = params
        return np.diag([cmath.exp(-0.5j * th), cmath.exp(0.5j * th)])
    if name == "prx":
        th, phi = params
        c, s = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -1j * cmath.exp(-1j * phi) * s],
                         [-1j * cmath.exp(1j * phi) * s, c]])
    if name == "cx":
        m = np.eye(4, dtype=complex)
        m[[2, 3]] = m[[3, 2]]
        return m
    if name == "cz":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if name == "swap":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    if name == "rxx":
        (th,) = params
        c, s = math.cos(th / 2), math.sin(th / 2)
        m = c * np.eye(4, dtype=complex)
        anti = -1j * s
        m[0, 3] = m[1, 2] = m[2, 1] = m[3, 0] = anti
        return m
    raise ValidationError(f"simulator has no gate {name!r}")


def _insert_zero_bit(indices: np.ndarray, pos: int) -> np.ndarray:
    low = indices & ((1 << pos) - 1)
    return ((indices >> pos) << (pos + 1)) | low


def _apply_1q(state: np.ndarray, mat: np.ndarray, w: int, m: int) -> None:
    base = np.arange(2 ** (m - 1), dtype=np.intp)
    i0 = _insert_zero_bit(base, w)
    i1 = i0 | (1 << w)
    a0 = state[i0].copy()
    a1 = state[i1]
    state[i0] = mat[0, 0] * a0 + mat[0, 1] * a1
    state[i1] = mat[1, 0] * a0 + mat[1, 1] * a1


def _apply_2q(state: np.ndarray, mat: np.ndarray, wa: int, wb: int, m: int) -> None:
    # first operand (wa) is the most significant bit of the matrix index
    s1, s2 = sorted((wa, wb))
    base = np.arange(2 ** (m - 2), dtype=np.intp)
    i00 = _insert_zero_bit(_insert_zero_bit(base, s1), s2)
    idx = [i00 | (a << wa) | (b << wb) for a in (0, 1) for b in (0, 1)]
    amps = np.stack([state[i] for i in idx])
    new = mat @ amps
    for k, i in enumerate(idx):
        state[i] = new[k]


def simulate_circuit(circuit: QuantumCircuit, shots: int, seed: Optional[int],
                     confusion: Optional[dict[int, tuple[float, float]]] = None,
                     cancel: Optional[threading.Event] = None) -> Counts:
    """Execute a parsed circuit and sample measurement outcomes.

    Measurement is terminal per qubit: a measured qubit must not appear in
    any later op. Counts keys cover the measured clbits only, lowest clbit
    rightmost.
    """
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    wires = sorted({q for op in circuit.ops if not op.is_barrier for q in op.qubits})
    m = len(wires)
    if m > MAX_SIM_QUBITS:
        raise ValidationError(f"{m} active qubits exceeds the simulator cap {MAX_SIM_QUBITS}")
    pos = {q: i for i, q in enumerate(wires)}

    state = np.zeros(2**m, dtype=complex)
    state[0] = 1.0
    measured: dict[int, int] = {}  # clbit -> wire position
    measured_qubit: dict[int, int] = {}  # clbit -> physical qubit
    done_qubits: set[int] = set()
    for k, op in enumerate(circuit.ops):
        if cancel is not None and k % _CANCEL_CHECK_EVERY == 0 and cancel.is_set():
            raise Cancelled("execution cancelled")
        if op.is_barrier:
            continue
        for q in op.qubits:
            if q in done_qubits:
                raise ValidationError(f"qubit {q} used after measurement")
        if op.is_measure:
            measured[op.clbits[0]] = pos[op.qubits[0]]
            measured_qubit[op.clbits[0]] = op.qubits[0]
            done_qubits.add(op.qubits[0])
            continue
        mat = _matrix(op.name, op.params)
        if len(op.qubits) == 1:
            _apply_1q(state, mat, pos[op.qubits[0]], m)
        else:
            _apply_2q(state, mat, pos[op.qubits[0]], pos[op.qubits[1]], m)

    if cancel is not None and cancel.is_set():
        raise Cancelled("execution cancelled")

    probs = np.abs(state) ** 2
    total = probs.sum()
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValidationError("statevector norm drifted beyond tolerance")
    cum = np.cumsum(probs / total)
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cum, rng.random(shots), side="right")
    np.clip(draws, 0, 2**m - 1, out=draws)

    clbits = sorted(measured)
    bits = {}
    for c in clbits:
        value = (draws >> measured[c]) & 1
        if confusion is not None:
            p0, p1 = confusion[measured_qubit[c]]
            correct = np.where(value == 1, p1, p0)
            keep = rng.random(shots) < correct
            value = np.where(keep, value, 1 - value)
        bits[c] = value

    codes = np.zeros(shots, dtype=np.int64)
    for rank, c in enumerate(clbits):  # rank 0 = lowest clbit = rightmost char
        codes |= bits[c].astype(np.int64) << rank
    width = len(clbits)
    values, counts = np.unique(codes, return_counts=True)
    table = {np.binary_repr(v, width=width) if width else "": int(n)
             for v, n in zip(values, counts)}
    return Counts(table, shots)


def simulate_program(program: str, shots: int, seed: Optional[int],
                     confusion: Optional[dict[int, tuple[float, float]]] = None,
                     cancel: Optional[threading.Event] = None) -> Counts:
    """Parse low-level text and execute it."""
    try:
        circuit = parse_lowlevel(program)
    except ValueError as exc:
        raise ValidationError(f"program does not parse: {exc}") from exc
    return simulate_circuit(circuit, shots, seed, confusion=confusion, cancel=cancel)
