"""Data-driven gate set translation.

Rewrite rules live in data/decompositions.json, one table per target gate
set. Rules may produce gates that have rules themselves; translation runs
to a fixpoint with a round cap so a bad table cannot loop forever.

Parameter expressions in the table are a tiny arithmetic language over
p0..p9 (the source gate's parameters) and the constant pi.
"""
from __future__ import annotations

import ast
import json
import math
import operator
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from ministack.circuits import GateOp, Level, QuantumCircuit
from ministack.devices.types import DeviceProperties

_MAX_ROUNDS = 16

_BIN_OPS = {ast.Add: operator.add, ast.Sub: operator.sub,
            ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY_OPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


class TranslationError(ValueError):
    pass


def _eval_node(node: ast.AST, params: Sequence[float]) -> float:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, params)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return math.pi
        if node.id.startswith("p") and node.id[1:].isdigit():
            idx = int(node.id[1:])
            if idx >= len(params):
                raise TranslationError(f"rule references missing parameter p{idx}")
            return params[idx]
        raise TranslationError(f"unknown name {node.id!r} in rule expression")
    if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
        return _BIN_OPS[type(node.op)](_eval_node(node.left, params),
                                       _eval_node(node.right, params))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY_OPS:
        return _UNARY_OPS[type(node.op)](_eval_node(node.operand, params))
    raise TranslationError(f"disallowed expression node {type(node).__name__}")


def eval_param_expr(expr: str, params: Sequence[float]) -> float:
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise TranslationError(f"bad rule expression {expr!r}") from exc
    return _eval_node(tree, params)


@lru_cache(maxsize=1)
def available_tables() -> tuple[dict, ...]:
    text = (resources.files("ministack.compiler") / "data" /
            "decompositions.json").read_text(encoding="utf-8")
    data = json.loads(text)
    return tuple(data["tables"])


def table_for_device(native_gates) -> dict:
    """The largest table whose target gates the device supports."""
    names = set(native_gates)
    fits = [t for t in available_tables() if set(t["gates"]) <= names]
    if not fits:
        raise TranslationError(
            f"no decomposition table targets a subset of {sorted(names)}")
    return max(fits, key=lambda t: len(t["gates"]))


def _instantiate(step: dict, op: GateOp) -> GateOp:
    qubits = tuple(op.qubits[i] for i in step.get("q", [0]))
    params = tuple(eval_param_expr(e, op.params) for e in step.get("p", []))
    return GateOp(step["g"], params, qubits)


def translate_ops(ops: Sequence[GateOp], native_gates,
                  table: Optional[dict] = None) -> tuple[GateOp, ...]:
    if table is None:
        table = table_for_device(native_gates)
    rules = table["rules"]
    names = set(native_gates)
    work = list(ops)
    for _ in range(_MAX_ROUNDS):
        out: list[GateOp] = []
        changed = False
        for op in work:
            if op.is_barrier or op.is_measure or op.name in names:
                out.append(op)
                continue
            rule = rules.get(op.name)
            if rule is None:
                raise TranslationError(
                    f"no rule lowers {op.name} to {sorted(names)}")
            out.extend(_instantiate(step, op) for step in rule)
            changed = True
        work = out
        if not changed:
            return tuple(work)
    raise TranslationError("translation did not reach a fixpoint")


def translate_circuit(circuit: QuantumCircuit,
                      props: DeviceProperties) -> QuantumCircuit:
    """Lower a circuit to the device gate set.

    Wire indices are taken as physical already; the output is NATIVE with
    an identity layout. Placement and routing, when wanted, run before.
    """
    ops = translate_ops(circuit.ops, props.native_gates)
    return QuantumCircuit(
        Level.NATIVE, circuit.num_qubits, circuit.num_clbits, ops,
        layout=dict(circuit.layout) if circuit.layout is not None
        else {q: q for q in range(circuit.num_qubits)},
        device_id=props.device_id)
