"""Fidelity-aware greedy initial placement.

Logical wires are placed in order of how many distinct two-qubit partners
they have. The first goes to the endpoint of the best physical edge; each
subsequent wire goes to the free physical qubit that maximizes the summed
fidelity of interaction edges it newly realizes. All ties break toward the
lower index so the result is deterministic.
"""
from __future__ import annotations

from statistics import fmean
from typing import Optional

from ministack.circuits import QuantumCircuit
from ministack.devices.types import DeviceProperties, TelemetrySnapshot


class PlacementError(ValueError):
    pass


def edge_fidelities(props: DeviceProperties,
                    snapshot: Optional[TelemetrySnapshot]) -> dict[frozenset, float]:
    """Mean two-qubit gate fidelity per coupling edge; 1.0 without telemetry."""
    fids: dict[frozenset, list[float]] = {}
    if snapshot is not None:
        for (name, qubits), f in snapshot.gate_fidelity.items():
            if len(qubits) == 2:
                fids.setdefault(frozenset(qubits), []).append(f)
    out = {}
    for a, b in props.coupling_map:
        edge = frozenset((a, b))
        values = fids.get(edge)
        out[edge] = fmean(values) if values else 1.0
    return out


def _interaction_graph(circuit: QuantumCircuit) -> dict[int, set[int]]:
    partners: dict[int, set[int]] = {q: set() for q in range(circuit.num_qubits)}
    for op in circuit.ops:
        if op.is_barrier or op.is_measure or len(op.qubits) != 2:
            continue
        a, b = op.qubits
        partners[a].add(b)
        partners[b].add(a)
    return partners


def place(circuit: QuantumCircuit, props: DeviceProperties,
          snapshot: Optional[TelemetrySnapshot] = None) -> dict[int, int]:
    n = circuit.num_qubits
    if n > props.num_qubits:
        raise PlacementError(
            f"{n} wires cannot map onto {props.num_qubits} physical qubits")
    fid = edge_fidelities(props, snapshot)
    partners = _interaction_graph(circuit)
    order = sorted(range(n), key=lambda q: (-len(partners[q]), q))

    neighbors: dict[int, set[int]] = {p: set() for p in range(props.num_qubits)}
    for a, b in props.coupling_map:
        neighbors[a].add(b)
        neighbors[b].add(a)

    def best_incident(p: int) -> float:
        incident = [fid[frozenset((p, m))] for m in neighbors[p]]
        return max(incident) if incident else 0.0

    mapping: dict[int, int] = {}
    free = set(range(props.num_qubits))
    for logical in order:
        placed_partners = [mapping[m] for m in partners[logical] if m in mapping]
        if not placed_partners:
            if partners[logical]:
                # seed an interacting component at the best edge endpoint
                p = max(free, key=lambda c: (best_incident(c), -c))
            else:
                p = min(free)
        else:
            def gain(c: int) -> float:
                return sum(fid[frozenset((c, pp))] for pp in placed_partners
                           if pp in neighbors[c])
            p = max(free, key=lambda c: (gain(c), -c))
        mapping[logical] = p
        free.discard(p)
    return mapping
