from .config import ServiceConfig, config_from_mapping, load_config
from .mitigation import (
    MAX_MITIGATED_BITS,
    SingularConfusion,
    confusions_for,
    mitigated_histogram,
    raw_histogram,
)
from .orchestrator import Orchestrator, SubmissionRequest

__all__ = [
    "ServiceConfig",
    "config_from_mapping",
    "load_config",
    "MAX_MITIGATED_BITS",
    "SingularConfusion",
    "confusions_for",
    "mitigated_histogram",
    "raw_histogram",
    "Orchestrator",
    "SubmissionRequest",
]
