"""Shared verification helpers for compiled-circuit equivalence.

The compiled form of a circuit acts on physical qubits, starts with wires
at the placement positions, and may end with them elsewhere after routed
swaps. Equivalence therefore means: the compiled unitary V equals some
wire permutation composed with the input unitary A embedded at the initial
positions, where the permutation sends each wire's initial position to the
position the recorded final layout claims. Ancilla wires may permute among
themselves freely (they carry |0> on hardware).
"""
import numpy as np

from ministack.circuits import GateOp, Level, QuantumCircuit, circuit_unitary


def _compact(ops, index, num_qubits):
    mapped = [GateOp(op.name, op.params, tuple(index[q] for q in op.qubits))
              for op in ops if not op.is_barrier and not op.is_measure]
    return QuantumCircuit(Level.NATIVE, num_qubits, 0, mapped,
                          layout={i: i for i in range(num_qubits)})


def compiled_equivalent(generic, native, init_layout, final_layout,
                        tol=1e-9) -> bool:
    """True iff `native` implements `generic` up to the layout permutation."""
    gen_wires = sorted({q for op in generic.ops for q in op.qubits
                        if not op.is_barrier})
    touched = {q for op in native.ops for q in op.qubits if not op.is_barrier}
    touched |= {init_layout[l] for l in gen_wires}
    touched |= {final_layout[l] for l in gen_wires}
    order = sorted(touched)
    if not order:
        return True
    index = {p: i for i, p in enumerate(order)}
    m = len(order)

    v = circuit_unitary(_compact(native.ops, index, m))
    emb = {l: index[init_layout[l]] for l in gen_wires}
    a_ops = [GateOp(op.name, op.params, tuple(emb[q] for q in op.qubits))
             for op in generic.ops if not op.is_barrier and not op.is_measure]
    a = circuit_unitary(QuantumCircuit(
        Level.NATIVE, m, 0, a_ops, layout={i: i for i in range(m)}))

    w = v @ a.conj().T
    mags = np.abs(w)
    # w must be a permutation matrix up to per-entry phases
    if not (np.allclose(mags.sum(axis=0), 1.0, atol=tol * 10)
            and np.allclose(mags.sum(axis=1), 1.0, atol=tol * 10)
            and np.allclose(mags.max(axis=0), 1.0, atol=tol * 10)):
        return False
    # each input wire must land where the final layout says
    for l in gen_wires:
        i, f = index[init_layout[l]], index[final_layout[l]]
        xi = circuit_unitary(QuantumCircuit(
            Level.NATIVE, m, 0, [GateOp("x", (), (i,))],
            layout={i: i}))
        xf = circuit_unitary(QuantumCircuit(
            Level.NATIVE, m, 0, [GateOp("x", (), (f,))],
            layout={f: f}))
        if not np.allclose(w @ xi @ w.conj().T, xf, atol=tol * 100):
            return False
    return True
