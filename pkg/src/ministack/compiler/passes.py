"""Peephole optimization passes over op lists.

Each pass maps a gate sequence to an equivalent one (global phase aside) and
never moves an operation across a barrier or a measurement it overlaps.
"""
from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from ministack.circuits import GateOp
from ministack.circuits.unitary import gate_matrix

_SELF_INVERSE = frozenset({"h", "x", "y", "z", "cx", "cz", "swap", "id"})
_DAGGER_PAIRS = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}
_ROTATIONS = frozenset({"rx", "ry", "rz", "rxx"})
_SYMMETRIC = frozenset({"cz", "swap", "rxx"})

# gates diagonal in the computational basis commute freely with each other
_DIAGONAL = frozenset({"z", "s", "sdg", "t", "tdg", "rz", "cz"})
_X_FAMILY = frozenset({"x", "rx"})

_FUSABLE_1Q = frozenset({"id", "x", "y", "z", "h", "s", "sdg", "t", "tdg",
                         "rx", "ry", "rz", "prx"})

_ELIDE_TOL = 1e-12


def _touches(op: GateOp, qubit: int) -> bool:
    if op.is_barrier and not op.qubits:
        return True  # a bare barrier fences every wire
    return qubit in op.qubits


def _overlap(a: GateOp, b: GateOp) -> bool:
    if (a.is_barrier and not a.qubits) or (b.is_barrier and not b.qubits):
        return True
    return bool(set(a.qubits) & set(b.qubits))


def _same_operands(a: GateOp, b: GateOp) -> bool:
    if a.qubits == b.qubits:
        return True
    return a.name in _SYMMETRIC and set(a.qubits) == set(b.qubits)


def _inverse_pair(a: GateOp, b: GateOp) -> bool:
    if a.is_barrier or a.is_measure or b.is_barrier or b.is_measure:
        return False
    if a.name in _SELF_INVERSE and b.name == a.name:
        return _same_operands(a, b)
    if _DAGGER_PAIRS.get(a.name) == b.name:
        return a.qubits == b.qubits
    if a.name in _ROTATIONS and b.name == a.name:
        return _same_operands(a, b) and b.params[0] == -a.params[0]
    if a.name == "prx" and b.name == "prx":
        return (a.qubits == b.qubits and b.params[0] == -a.params[0]
                and b.params[1] == a.params[1])
    return False


def _commutes(a: GateOp, b: GateOp) -> bool:
    if a.is_barrier or b.is_barrier:
        return False
    if not _overlap(a, b):
        return True
    if a.is_measure or b.is_measure:
        return False
    if a.name in _DIAGONAL and b.name in _DIAGONAL:
        return True
    if (a.name in _X_FAMILY and b.name in _X_FAMILY
            and a.qubits == b.qubits):
        return True
    return False


def cancel_inverse_pairs(ops: Sequence[GateOp]) -> tuple[GateOp, ...]:
    """Drop op pairs that compose to identity, repeatedly.

    A pair cancels when the later op is the earliest following op that
    overlaps the first one, so removal is sound without any reordering.
    """
    work = list(ops)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(work):
            a = work[i]
            if a.is_barrier or a.is_measure:
                i += 1
                continue
            for j in range(i + 1, len(work)):
                if not _overlap(a, work[j]):
                    continue
                if _inverse_pair(a, work[j]):
                    del work[j]
                    del work[i]
                    changed = True
                    i -= 1
                break
            i += 1
    return tuple(work)


def commute_reorder(ops: Sequence[GateOp]) -> tuple[GateOp, ...]:
    """Sink ops leftward through commuting neighbors toward a cancelling
    partner. Bounded by len(ops)^2 moves so pathological inputs terminate."""
    work = list(ops)
    budget = len(work) ** 2
    changed = True
    while changed and budget > 0:
        changed = False
        for j in range(1, len(work)):
            b = work[j]
            if b.is_barrier or b.is_measure:
                continue
            i = j - 1
            while i >= 0:
                a = work[i]
                if _inverse_pair(a, b):
                    if i + 1 < j:
                        work.insert(i + 1, work.pop(j))
                        budget -= 1
                        changed = True
                    break
                if _commutes(a, b):
                    i -= 1
                    continue
                break
            if changed:
                break
    return tuple(work)


def _zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (lam, theta, phi) with u ~ rz(phi) @ ry(theta) @ rz(lam).

    Normalizing to SU(2) first pins the half-angle branch: with theta in
    [0, pi] both cos(theta/2) and sin(theta/2) are non-negative, so the args
    of the matrix entries carry the phase sums without sign ambiguity.
    """
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    su = u * cmath.exp(-0.5j * cmath.phase(det))
    theta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < _ELIDE_TOL:         # diagonal: only phi+lam fixed
        return (0.0, 0.0, 2.0 * cmath.phase(su[1, 1]))
    if abs(su[0, 0]) < _ELIDE_TOL:         # antidiagonal: only phi-lam fixed
        return (0.0, math.pi, 2.0 * cmath.phase(su[1, 0]))
    plus = 2.0 * cmath.phase(su[1, 1])
    minus = 2.0 * cmath.phase(su[1, 0])
    return ((plus - minus) / 2.0, theta, (plus + minus) / 2.0)


def _fuse_run(run: list[GateOp]) -> list[GateOp]:
    qubit = run[0].qubits[0]
    u = np.eye(2, dtype=complex)
    for op in run:
        u = gate_matrix(op.name, op.params) @ u
    lam, theta, phi = _zyz_angles(u)
    fused = []
    if abs(lam) > _ELIDE_TOL:
        fused.append(GateOp("rz", (lam,), (qubit,)))
    if abs(theta) > _ELIDE_TOL:
        fused.append(GateOp("ry", (theta,), (qubit,)))
    if abs(phi) > _ELIDE_TOL:
        fused.append(GateOp("rz", (phi,), (qubit,)))
    # only rewrite when it actually saves gates
    return fused if len(fused) < len(run) else run


def fuse_1q(ops: Sequence[GateOp]) -> tuple[GateOp, ...]:
    """Collapse single-qubit gate runs into at most rz, ry, rz.

    Runs accumulate per qubit and flush when anything else touches that
    qubit, so gates never cross an overlapping multi-qubit op, measure, or
    barrier. Runs on distinct qubits may drift past disjoint ops, which is
    sound and keeps the walk single-pass.
    """
    out: list[GateOp] = []
    pending: dict[int, list[GateOp]] = {}

    def flush(qubit: int) -> None:
        run = pending.pop(qubit, None)
        if run:
            out.extend(_fuse_run(run))

    for op in ops:
        if (not op.is_measure and not op.is_barrier
                and len(op.qubits) == 1 and op.name in _FUSABLE_1Q):
            pending.setdefault(op.qubits[0], []).append(op)
            continue
        if op.is_barrier and not op.qubits:
            for q in sorted(pending):
                flush(q)
        else:
            for q in op.qubits:
                flush(q)
        out.append(op)
    for q in sorted(pending):
        flush(q)
    return tuple(out)
