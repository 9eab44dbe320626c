"""Swap-insertion routing onto a device coupling map.

Two strategies behind one entry point. When the placement state space is
small (arrangements of circuit wires over physical qubits below a fixed
cap) routing is exact: Dijkstra over (next 2q gate, wire positions) states
finds a minimum-swap schedule, with the total swap-edge fidelity penalty
as tie-break. Larger devices fall back to a greedy walk: each non-adjacent
two-qubit gate moves one operand along a shortest path, preferring the
path with the highest product of edge fidelities. Remaining ties go to the
lexicographically smallest choice, so both strategies are deterministic.
"""
from __future__ import annotations

import heapq
import itertools
import math
from typing import Optional

from ministack.circuits import GateOp, Level, QuantumCircuit
from ministack.devices.types import DeviceProperties, TelemetrySnapshot

from .placement import PlacementError, edge_fidelities

# exact search iff arrangements(num_qubits, wires) and the 2q-gate count
# stay below these; beyond them the state space outgrows its usefulness
_EXACT_ARRANGEMENT_CAP = 1000
_EXACT_MAX_INTERACTIONS = 64


class RoutingError(ValueError):
    pass


def _shortest_paths(neighbors: dict[int, set[int]], src: int,
                    dst: int) -> list[tuple[int, ...]]:
    """Every shortest src->dst path, via BFS distances."""
    dist = {src: 0}
    frontier = [src]
    while frontier and dst not in dist:
        nxt = []
        for u in frontier:
            for v in neighbors[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    if dst not in dist:
        raise RoutingError(f"qubits {src} and {dst} are disconnected")
    paths: list[tuple[int, ...]] = []

    def walk(prefix: list[int]) -> None:
        u = prefix[-1]
        if u == dst:
            paths.append(tuple(prefix))
            return
        for v in sorted(neighbors[u]):
            if dist.get(v) == dist[u] + 1:
                walk(prefix + [v])

    walk([src])
    return paths


def _arrangements(n_phys: int, wires: int) -> int:
    total = 1
    for i in range(wires):
        total *= n_phys - i
        if total > _EXACT_ARRANGEMENT_CAP:
            break
    return total


def _exact_swap_plan(interactions: list[tuple[int, int]], n_phys: int,
                     initial_layout: dict[int, int],
                     neighbors: dict[int, set[int]],
                     fid: dict[frozenset, float],
                     ) -> dict[int, list[tuple[int, int]]]:
    """Minimum-swap schedule executing the 2q-gate list in order.

    Returns {gate index -> swaps to apply just before that gate}. States
    are (next gate index, slot occupancy); every coupling edge is a legal
    swap whether or not both slots hold a circuit wire. Cost is
    (swap count, sum of -log edge fidelity), compared lexicographically.
    """
    occupancy = [-1] * n_phys
    for logical, phys in initial_layout.items():
        occupancy[phys] = logical
    edges = sorted(tuple(sorted(pair)) for pair in
                   {frozenset(e) for e in fid})

    def consume(idx: int, occ: tuple[int, ...]) -> int:
        pos = {l: p for p, l in enumerate(occ) if l >= 0}
        while idx < len(interactions):
            a, b = interactions[idx]
            if pos[b] not in neighbors[pos[a]]:
                break
            idx += 1
        return idx

    goal = len(interactions)
    start = (consume(0, tuple(occupancy)), tuple(occupancy))
    best: dict[tuple, tuple[int, float]] = {start: (0, 0.0)}
    parent: dict[tuple, Optional[tuple]] = {start: None}
    counter = itertools.count()
    heap = [(0, 0.0, next(counter), start)]
    final = None
    while heap:
        swaps_n, penalty, _, state = heapq.heappop(heap)
        if (swaps_n, penalty) > best.get(state, (swaps_n, penalty)):
            continue
        idx, occ = state
        if idx == goal:
            final = state
            break
        for a, b in edges:
            swapped = list(occ)
            swapped[a], swapped[b] = swapped[b], swapped[a]
            nidx = consume(idx, tuple(swapped))
            nstate = (nidx, tuple(swapped))
            f = fid.get(frozenset((a, b)), 1.0)
            step = -math.log(f) if f > 0.0 else math.inf
            ncost = (swaps_n + 1, penalty + step)
            if ncost < best.get(nstate, (math.inf, 0.0)):
                best[nstate] = ncost
                parent[nstate] = (state, (a, b))
                heapq.heappush(heap, (*ncost, next(counter), nstate))
    if final is None:
        a, b = interactions[0]
        raise RoutingError(f"qubits for a gate on wires {a} and {b} are "
                           f"unreachable on this coupling map")

    plan: dict[int, list[tuple[int, int]]] = {}
    chain = []
    state = final
    while parent[state] is not None:
        prev, edge = parent[state]
        chain.append((prev[0], edge))
        state = prev
    for idx, edge in reversed(chain):
        plan.setdefault(idx, []).append(edge)
    return plan


def route(circuit: QuantumCircuit, props: DeviceProperties,
          snapshot: Optional[TelemetrySnapshot] = None,
          initial_layout: Optional[dict[int, int]] = None
          ) -> tuple[QuantumCircuit, int]:
    """Returns the physically addressed circuit and the swap count.

    The output spans the whole device register. Its layout maps each input
    wire to the physical qubit holding it at the end; swap-path qubits that
    carried no wire get fresh ancilla wire ids above the input width.
    """
    if initial_layout is None:
        initial_layout = {q: q for q in range(circuit.num_qubits)}
    if circuit.num_qubits > props.num_qubits:
        raise RoutingError(
            f"{circuit.num_qubits} wires exceed device size {props.num_qubits}")

    fid = edge_fidelities(props, snapshot)
    neighbors: dict[int, set[int]] = {p: set() for p in range(props.num_qubits)}
    for a, b in props.coupling_map:
        neighbors[a].add(b)
        neighbors[b].add(a)

    phys_of = dict(initial_layout)
    logical_at = {p: l for l, p in phys_of.items()}

    interactions = [(op.qubits[0], op.qubits[1]) for op in circuit.ops
                    if len(op.qubits) == 2
                    and not op.is_measure and not op.is_barrier]
    plan: Optional[dict[int, list[tuple[int, int]]]] = None
    if (len(interactions) <= _EXACT_MAX_INTERACTIONS
            and _arrangements(props.num_qubits, len(phys_of))
            <= _EXACT_ARRANGEMENT_CAP):
        plan = _exact_swap_plan(interactions, props.num_qubits,
                                initial_layout, neighbors, fid)

    def apply_swap(a: int, b: int, out: list[GateOp]) -> None:
        out.append(GateOp("swap", (), (a, b)))
        la, lb = logical_at.get(a), logical_at.get(b)
        if la is not None:
            phys_of[la] = b
        if lb is not None:
            phys_of[lb] = a
        logical_at[a], logical_at[b] = lb, la

    def best_path(src: int, dst: int) -> tuple[int, ...]:
        def score(path: tuple[int, ...]):
            product = 1.0
            for u, v in zip(path, path[1:]):
                product *= fid[frozenset((u, v))]
            return (-product, path)

        return min(_shortest_paths(neighbors, src, dst), key=score)

    out: list[GateOp] = []
    touched: set[int] = set()
    swaps = 0
    gate_idx = 0
    for op in circuit.ops:
        if op.is_barrier:
            out.append(GateOp("barrier", (), tuple(phys_of[q] for q in op.qubits)))
            continue
        if len(op.qubits) == 2 and not op.is_measure:
            if plan is not None:
                for a, b in plan.get(gate_idx, ()):
                    apply_swap(a, b, out)
                    touched.update((a, b))
                    swaps += 1
                gate_idx += 1
            else:
                pa, pb = phys_of[op.qubits[0]], phys_of[op.qubits[1]]
                if pb not in neighbors[pa]:
                    path = best_path(pa, pb)
                    for step in range(len(path) - 2):
                        apply_swap(path[step], path[step + 1], out)
                        touched.update(path[step:step + 2])
                        swaps += 1
            pa, pb = phys_of[op.qubits[0]], phys_of[op.qubits[1]]
            out.append(GateOp(op.name, op.params, (pa, pb)))
            touched.update((pa, pb))
            continue
        mapped = tuple(phys_of[q] for q in op.qubits)
        touched.update(mapped)
        out.append(GateOp(op.name, op.params, mapped, op.clbits))
    layout = dict(phys_of)
    next_wire = circuit.num_qubits
    for p in sorted(touched - set(layout.values())):
        layout[next_wire] = p
        next_wire += 1
    routed = QuantumCircuit(Level.NATIVE, props.num_qubits, circuit.num_clbits,
                            out, layout=layout, device_id=props.device_id)
    return routed, swaps
