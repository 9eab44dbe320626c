"""Device management layer: registry, sessions, job lifecycle, and the
property query interface backends plug into."""
from .types import (
    Counts,
    DeviceProperties,
    DevicePlugin,
    JobRecord,
    JobState,
    Session,
    TelemetrySnapshot,
    TERMINAL_STATES,
    allowed_transition,
)
from .errors import (
    AlreadyClosed,
    AlreadyTerminal,
    AuthError,
    Cancelled,
    DuplicateDevice,
    IllegalTransition,
    InvalidProperties,
    LimitError,
    NotDone,
    UnknownDevice,
    UnknownJob,
    UnknownKey,
    ValidationError,
)
from .validate import validate_program
from .core import DeviceRegistry, STATIC_KEYS, DYNAMIC_KEYS

__all__ = [
    "Counts",
    "DeviceProperties",
    "DevicePlugin",
    "JobRecord",
    "JobState",
    "Session",
    "TelemetrySnapshot",
    "TERMINAL_STATES",
    "allowed_transition",
    "AlreadyClosed",
    "AlreadyTerminal",
    "AuthError",
    "Cancelled",
    "DuplicateDevice",
    "IllegalTransition",
    "InvalidProperties",
    "LimitError",
    "NotDone",
    "UnknownDevice",
    "UnknownJob",
    "UnknownKey",
    "ValidationError",
    "validate_program",
    "DeviceRegistry",
    "STATIC_KEYS",
    "DYNAMIC_KEYS",
]
