"""The simulated device plugin: profile-driven telemetry plus statevector
execution behind the device-plugin contract."""
from __future__ import annotations

import math
import threading
import time
import zlib
from typing import Optional

import numpy as np

from ministack.devices.errors import ValidationError
from ministack.devices.types import Counts, DeviceProperties, TelemetrySnapshot
from ministack.devices.validate import validate_program

from .profiles import DeviceProfile
from .simulator import simulate_circuit


class SimulatedDevice:
    """One simulated QPU.

    Telemetry is synthetic calibration data: every entry drifts as
    base + amplitude*sin(2*pi*t/period) + gauss(0, sigma), clamped to [0,1],
    re-drawn once per refresh interval. The generator is seeded per
    (profile seed, entry label, interval index), so snapshots are identical
    within an interval and reproducible across processes.

    Execution is exclusive: concurrent execute() calls on one device are a
    contract violation and raise instead of interleaving.
    """

    def __init__(self, profile: DeviceProfile, clock=time.time):
        self._profile = profile
        self._clock = clock
        self._exec_lock = threading.Lock()

    @property
    def profile(self) -> DeviceProfile:
        return self._profile

    def static_properties(self) -> DeviceProperties:
        return self._profile.properties

    def _drift_value(self, label: str, bucket: int, base: float, amplitude: float,
                     sigma: float, lo: float = 0.0, hi: float = 1.0) -> float:
        p = self._profile
        t0 = bucket * p.refresh_interval_s
        seq = np.random.SeedSequence(
            [p.rng_seed, zlib.crc32(label.encode("utf-8")), bucket])
        rng = np.random.default_rng(seq)
        value = base + amplitude * math.sin(2.0 * math.pi * t0 / p.drift_period_s)
        value += rng.normal(0.0, sigma)
        return min(hi, max(lo, value))

    def telemetry(self, now: Optional[float] = None) -> TelemetrySnapshot:
        p = self._profile
        props = p.properties
        if now is None:
            now = self._clock()
        bucket = int(now // p.refresh_interval_s)
        stamp = bucket * p.refresh_interval_s

        gate_fidelity: dict[tuple[str, tuple[int, ...]], float] = {}
        for gate, arity in sorted(props.native_gates.items()):
            if gate == "measure":
                continue
            if arity == 1:
                for q in range(props.num_qubits):
                    gate_fidelity[(gate, (q,))] = self._drift_value(
                        f"fid:{gate}:{q}", bucket, p.base_fidelity_1q,
                        p.drift_amplitude, p.noise_sigma)
            else:
                for a, b in props.coupling_map:
                    gate_fidelity[(gate, (a, b))] = self._drift_value(
                        f"fid:{gate}:{a}-{b}", bucket, p.base_fidelity_2q,
                        p.drift_amplitude, p.noise_sigma)

        readout = {}
        confusion = {}
        for q in range(props.num_qubits):
            r = self._drift_value(f"readout:{q}", bucket, p.base_readout_fidelity,
                                  p.drift_amplitude, p.noise_sigma)
            readout[q] = r
            confusion[q] = (r, r)  # symmetric readout error

        temperature = self._drift_value(
            "temp", bucket, p.base_temperature_mk,
            p.base_temperature_mk * p.drift_amplitude,
            p.base_temperature_mk * p.noise_sigma, lo=0.0, hi=math.inf)

        return TelemetrySnapshot(
            device_id=props.device_id,
            taken_at=stamp,
            gate_fidelity=gate_fidelity,
            t1={q: p.t1_s for q in range(props.num_qubits)},
            t2={q: p.t2_s for q in range(props.num_qubits)},
            readout_fidelity=readout,
            confusion=confusion,
            temperature_mk=temperature,
            calibrated_at=stamp,
        )

    def execute(self, program: str, shots: int, seed: Optional[int],
                cancel: Optional[threading.Event] = None) -> Counts:
        if not self._exec_lock.acquire(blocking=False):
            raise RuntimeError(
                f"concurrent execute() on {self._profile.device_id}: "
                "the registry must serialize executions per device")
        try:
            circuit = validate_program(program, self._profile.properties)
            if shots < 1:
                raise ValidationError("shots must be >= 1")
            noise = None
            if self._profile.readout_noise:
                noise = self.telemetry().confusion
            return simulate_circuit(circuit, shots, seed, confusion=noise,
                                    cancel=cancel)
        finally:
            self._exec_lock.release()
