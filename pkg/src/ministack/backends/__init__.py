"""Simulated device backends: statevector execution plus synthetic telemetry."""
from .profiles import DeviceProfile, builtin_profiles, load_profile, profile_from_dict
from .simulator import simulate_circuit, simulate_program, MAX_SIM_QUBITS
from .plugin import SimulatedDevice

__all__ = [
    "DeviceProfile",
    "builtin_profiles",
    "load_profile",
    "profile_from_dict",
    "simulate_circuit",
    "simulate_program",
    "MAX_SIM_QUBITS",
    "SimulatedDevice",
]
