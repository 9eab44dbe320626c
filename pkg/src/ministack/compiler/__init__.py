"""Circuit compilation: optimization passes, translation, placement, routing."""

from .passes import cancel_inverse_pairs, commute_reorder, fuse_1q
from .translate import (
    TranslationError,
    available_tables,
    table_for_device,
    translate_ops,
    translate_circuit,
)
from .placement import place
from .routing import route
from .pipeline import (
    CompileStats,
    PassPipeline,
    compile_circuit,
    pipeline_named,
)

__all__ = [
    "cancel_inverse_pairs",
    "commute_reorder",
    "fuse_1q",
    "TranslationError",
    "available_tables",
    "table_for_device",
    "translate_ops",
    "translate_circuit",
    "place",
    "route",
    "CompileStats",
    "PassPipeline",
    "compile_circuit",
    "pipeline_named",
]
