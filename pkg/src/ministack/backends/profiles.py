"""Device profiles: static capabilities plus telemetry-generator parameters.

Profiles are plain JSON files (see data/) so operators can add devices
without code changes. The two built-ins:

  sc20 — 20 qubits on a 4x5 square lattice, native {prx, cz, measure}
  ion5 — 5 qubits, all-to-all coupling, native {rz, rx, rxx, measure}
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ministack.devices.types import DeviceProperties

_PROPERTY_FIELDS = ("device_id", "display_name", "num_qubits", "native_gates",
                    "coupling_map", "gate_durations", "shot_overhead", "setup_overhead")


@dataclass(frozen=True)
class DeviceProfile:
    """Everything a simulated backend needs: capabilities and noise model."""

    properties: DeviceProperties
    base_fidelity_1q: float
    base_fidelity_2q: float
    base_readout_fidelity: float
    drift_amplitude: float
    drift_period_s: float
    noise_sigma: float
    refresh_interval_s: float
    t1_s: float
    t2_s: float
    base_temperature_mk: float
    rng_seed: int
    readout_noise: bool = False

    def __post_init__(self):
        margin = self.drift_amplitude + 4.0 * self.noise_sigma
        for base in (self.base_fidelity_1q, self.base_fidelity_2q,
                     self.base_readout_fidelity):
            if base - margin < 0.0 or base + margin > 1.0:
                raise ValueError(
                    f"base fidelity {base} +/- drift and 4 sigma leaves [0,1]")
        if self.t2_s > 2.0 * self.t1_s:
            raise ValueError("t2 exceeds 2*t1")
        if self.drift_period_s <= 0 or self.refresh_interval_s <= 0:
            raise ValueError("periods must be positive")

    @property
    def device_id(self) -> str:
        return self.properties.device_id


def profile_from_dict(raw: dict) -> DeviceProfile:
    props = DeviceProperties(
        device_id=raw["device_id"],
        display_name=raw["display_name"],
        num_qubits=int(raw["num_qubits"]),
        native_gates={k: int(v) for k, v in raw["native_gates"].items()},
        coupling_map=tuple(tuple(sorted(map(int, pair))) for pair in raw["coupling_map"]),
        gate_durations={k: float(v) for k, v in raw["gate_durations"].items()},
        shot_overhead=float(raw["shot_overhead"]),
        setup_overhead=float(raw["setup_overhead"]),
    )
    return DeviceProfile(
        properties=props,
        base_fidelity_1q=float(raw["base_fidelity_1q"]),
        base_fidelity_2q=float(raw["base_fidelity_2q"]),
        base_readout_fidelity=float(raw["base_readout_fidelity"]),
        drift_amplitude=float(raw["drift_amplitude"]),
        drift_period_s=float(raw["drift_period_s"]),
        noise_sigma=float(raw["noise_sigma"]),
        refresh_interval_s=float(raw["refresh_interval_s"]),
        t1_s=float(raw["t1_s"]),
        t2_s=float(raw["t2_s"]),
        base_temperature_mk=float(raw["base_temperature_mk"]),
        rng_seed=int(raw["rng_seed"]),
        readout_noise=bool(raw.get("readout_noise", False)),
    )


def load_profile(path: str | Path) -> DeviceProfile:
    with open(path, encoding="utf-8") as f:
        return profile_from_dict(json.load(f))


def builtin_profiles() -> list[DeviceProfile]:
    """The two shipped profiles, sc20 then ion5."""
    profiles = []
    for name in ("sc20.json", "ion5.json"):
        raw = json.loads(resources.files("ministack.backends").joinpath("data", name)
                         .read_text(encoding="utf-8"))
        profiles.append(profile_from_dict(raw))
    return profiles
