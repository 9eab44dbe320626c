"""Histogram building and tensored readout-error mitigation.

A per-qubit confusion entry (p0, p1) gives the probabilities of reading a
prepared 0 as 0 and a prepared 1 as 1. Readout acts independently per bit,
so the observed distribution is the true one multiplied by a Kronecker
product of 2x2 column-stochastic matrices; mitigation applies each factor's
inverse along its own axis, clips negative leakage, and renormalizes.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ministack.circuits import QuantumCircuit
from ministack.devices.types import Counts, TelemetrySnapshot

MAX_MITIGATED_BITS = 16


class SingularConfusion(Exception):
    """p0 + p1 = 1 exactly: the confusion matrix has no inverse."""


def raw_histogram(counts: Counts) -> dict[str, float]:
    """Relative frequencies, keys as in counts."""
    total = counts.shots_total
    return {key: n / total for key, n in counts.counts.items()}


def _inverse_2x2(p0: float, p1: float) -> np.ndarray:
    for p in (p0, p1):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"confusion probability {p} outside [0, 1]")
    det = p0 + p1 - 1.0
    if det == 0.0:
        raise SingularConfusion(f"confusion ({p0}, {p1}) is not invertible")
    return np.array([[p1, p1 - 1.0], [p0 - 1.0, p0]]) / det


def mitigated_histogram(counts: Counts,
                        confusions: Sequence[tuple[float, float]]) -> dict[str, float]:
    """Invert per-bit readout noise on a histogram.

    confusions[k] belongs to the bit at rank k of the counts keys (rank 0 is
    the rightmost character). Entries the inversion drives negative are
    clipped to zero before renormalizing; keys with zero mass are dropped.
    """
    if not counts.counts:
        raise ValueError("empty counts")
    width = len(next(iter(counts.counts)))
    if width != len(confusions):
        raise ValueError(f"{len(confusions)} confusion entries for width {width}")
    if width > MAX_MITIGATED_BITS:
        raise ValueError(f"mitigation capped at {MAX_MITIGATED_BITS} bits, got {width}")

    vec = np.zeros(2**width)
    for key, n in counts.counts.items():
        vec[int(key, 2)] = n / counts.shots_total
    work = vec.reshape((2,) * width)
    for rank, (p0, p1) in enumerate(confusions):
        axis = width - 1 - rank
        inv = _inverse_2x2(p0, p1)
        work = np.moveaxis(np.tensordot(inv, work, axes=(1, axis)), 0, axis)

    flat = np.clip(work.reshape(-1), 0.0, None)
    flat /= flat.sum()  # clipping only adds mass, so the sum stays positive
    return {np.binary_repr(i, width=width): float(p)
            for i, p in enumerate(flat) if p > 0.0}


def confusions_for(circuit: QuantumCircuit,
                   snapshot: TelemetrySnapshot) -> list[tuple[float, float]]:
    """Confusion entries for a program's measured bits, ordered by rank.

    Rank follows the counts convention: measured clbits sorted ascending,
    rank 0 lowest. Qubits without telemetry read out perfectly.
    """
    qubit_of = {op.clbits[0]: op.qubits[0] for op in circuit.ops if op.is_measure}
    return [snapshot.confusion.get(qubit_of[c], (1.0, 1.0))
            for c in sorted(qubit_of)]
