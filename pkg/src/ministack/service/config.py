"""Service configuration: one flat JSON object with dotted keys.

Flat keys keep the file greppable and diff-friendly; nesting would add
nothing at this size. Unknown keys are rejected so typos fail loudly at
startup instead of silently keeping a default.
"""
from __future__ import annotations

import ipaddress
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ministack.fomac import HealthLimits
from ministack.scheduling.selection import SchedulingPolicy


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8440
    local_cidrs: tuple[str, ...] = ("127.0.0.0/8",)
    gateway_header: str = "x-internal-gateway"
    allowlist_path: Optional[str] = None
    max_shots: int = 1_000_000
    job_log_path: Optional[str] = None
    limits: HealthLimits = field(default_factory=HealthLimits)
    default_policy: SchedulingPolicy = field(default_factory=SchedulingPolicy)

    def __post_init__(self):
        for cidr in self.local_cidrs:  # typos should fail at startup
            ipaddress.ip_network(cidr)


_SCALARS = {
    "listen.host": ("host", str),
    "listen.port": ("port", int),
    "local.gateway_header": ("gateway_header", str),
    "auth.allowlist_path": ("allowlist_path", str),
    "limits.max_shots": ("max_shots", int),
    "log.job_log_path": ("job_log_path", str),
}

_FOMAC_KEYS = ("fomac.max_temperature_mk", "fomac.max_calibration_age_s")
_POLICY_KEYS = ("policy.w_esp", "policy.w_wait", "policy.w_exec")


def config_from_mapping(data: Mapping) -> ServiceConfig:
    known = set(_SCALARS) | set(_FOMAC_KEYS) | set(_POLICY_KEYS) | {"local.cidrs"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    fields: dict = {}
    for key, (name, cast) in _SCALARS.items():
        if key in data:
            fields[name] = cast(data[key])
    if "local.cidrs" in data:
        cidrs = data["local.cidrs"]
        if not isinstance(cidrs, (list, tuple)):
            raise ValueError("local.cidrs must be a list of CIDR strings")
        fields["local_cidrs"] = tuple(str(c) for c in cidrs)

    defaults = HealthLimits()
    fields["limits"] = HealthLimits(
        max_temperature_mk=float(data.get("fomac.max_temperature_mk",
                                          defaults.max_temperature_mk)),
        max_calibration_age_s=float(data.get("fomac.max_calibration_age_s",
                                             defaults.max_calibration_age_s)),
    )
    base = SchedulingPolicy()
    fields["default_policy"] = SchedulingPolicy(
        w_esp=float(data.get("policy.w_esp", base.w_esp)),
        w_wait=float(data.get("policy.w_wait", base.w_wait)),
        w_exec=float(data.get("policy.w_exec", base.w_exec)),
    )
    return ServiceConfig(**fields)


def load_config(path: str) -> ServiceConfig:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("config root must be a JSON object")
    return config_from_mapping(data)
