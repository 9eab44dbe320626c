"""End-to-end compilation: optimize, place, route, lower, emit."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from ministack.circuits import GateOp, Level, QuantumCircuit, emit_lowlevel
from ministack.devices.types import DeviceProperties, TelemetrySnapshot
from ministack.fomac import estimate_success_probability

from .passes import cancel_inverse_pairs, commute_reorder, fuse_1q
from .placement import place
from .routing import route
from .translate import translate_circuit

PassFn = Callable[[Sequence[GateOp]], tuple[GateOp, ...]]

_MAX_OPT_ROUNDS = 8


@dataclass(frozen=True)
class CompileStats:
    device_id: str
    pipeline: tuple[str, ...]
    gate_count_before: int
    gate_count_after: int
    depth_before: int
    depth_after: int
    swap_count: int
    esp_before: Optional[float] = None
    esp_after: Optional[float] = None
    initial_layout: tuple[tuple[int, int], ...] = ()


class PassPipeline:
    def __init__(self, passes: Sequence[tuple[str, PassFn]]):
        self.passes = tuple(passes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.passes)

    def run(self, ops: Sequence[GateOp]) -> tuple[GateOp, ...]:
        out = tuple(ops)
        for _, fn in self.passes:
            out = fn(out)
        return out

    def run_fixpoint(self, ops: Sequence[GateOp]) -> tuple[GateOp, ...]:
        out = tuple(ops)
        for _ in range(_MAX_OPT_ROUNDS):
            new = self.run(out)
            if new == out:
                break
            out = new
        return out


_PIPELINES: dict[str, PassPipeline] = {
    "default": PassPipeline([
        ("cancel", cancel_inverse_pairs),
        ("commute", commute_reorder),
        ("cancel", cancel_inverse_pairs),
        ("fuse", fuse_1q),
        ("cancel", cancel_inverse_pairs),
    ]),
    "none": PassPipeline([]),
}


def pipeline_named(name: str) -> PassPipeline:
    try:
        return _PIPELINES[name]
    except KeyError:
        raise ValueError(f"unknown optimization pipeline {name!r}") from None


def _gate_count(ops: Sequence[GateOp]) -> int:
    return sum(1 for op in ops if not op.is_barrier and not op.is_measure)


def compile_circuit(circuit: QuantumCircuit, props: DeviceProperties,
                    snapshot: Optional[TelemetrySnapshot] = None,
                    optimization: str = "default",
                    ) -> tuple[str, CompileStats, QuantumCircuit]:
    """Compile for a device; returns (program text, stats, native circuit).

    GENERIC input goes through optimize, place, route, translate. NATIVE
    input is taken as physically addressed already and only gets lowered
    plus a final cancellation sweep.
    """
    pipe = pipeline_named(optimization)
    count_before = _gate_count(circuit.ops)
    depth_before = circuit.depth()
    esp_before = (estimate_success_probability(circuit, snapshot)
                  if snapshot is not None else None)

    swaps = 0
    if circuit.level is Level.GENERIC:
        optimized = circuit.replace_ops(pipe.run_fixpoint(circuit.ops))
        layout = place(optimized, props, snapshot)
        routed, swaps = route(optimized, props, snapshot, layout)
        native = translate_circuit(routed, props)
    else:
        layout = circuit.layout or {}
        native = translate_circuit(circuit, props)
    if pipe.passes:
        # deletion-only cleanup; preserves nativeness and the layout
        native = native.replace_ops(cancel_inverse_pairs(native.ops))

    esp_after = (estimate_success_probability(native, snapshot)
                 if snapshot is not None else None)
    stats = CompileStats(
        device_id=props.device_id,
        pipeline=pipe.names,
        gate_count_before=count_before,
        gate_count_after=_gate_count(native.ops),
        depth_before=depth_before,
        depth_after=native.depth(),
        swap_count=swaps,
        esp_before=esp_before,
        esp_after=esp_after,
        initial_layout=tuple(sorted(layout.items())),
    )
    return emit_lowlevel(native), stats, native
