"""Simulator, telemetry, and plugin behavior for the built-in backends."""
import math
import threading
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ministack.backends import (
    MAX_SIM_QUBITS,
    SimulatedDevice,
    builtin_profiles,
    simulate_circuit,
    simulate_program,
)
from ministack.backends.profiles import DeviceProfile, profile_from_dict
from ministack.circuits import GateOp, circuit_unitary, native_circuit
from ministack.devices.errors import Cancelled, ValidationError

PI = math.pi


def _profile(device_id="sc20"):
    for p in builtin_profiles():
        if p.device_id == device_id:
            return p
    raise AssertionError(device_id)


def _measured_all(num_qubits, ops, layout=None):
    measures = [GateOp("measure", (), (q,), (q,)) for q in range(num_qubits)]
    return native_circuit(num_qubits, num_qubits, list(ops) + measures,
                          layout or {q: q for q in range(num_qubits)})


def _oracle_distribution(circuit):
    """Measurement distribution from the dense-unitary route.

    Keys follow the counts convention: one character per measured clbit,
    lowest clbit rightmost.
    """
    unitary_ops = [op for op in circuit.ops if not op.is_measure]
    measures = [(op.clbits[0], op.qubits[0]) for op in circuit.ops if op.is_measure]
    probe = circuit.replace_ops(unitary_ops)
    u = circuit_unitary(probe)
    amps = u[:, 0]
    probs = np.abs(amps) ** 2
    clbits = sorted(c for c, _ in measures)
    width = len(clbits)
    dist: dict[str, float] = {}
    for idx, p in enumerate(probs):
        if p < 1e-18:
            continue
        chars = []
        for c in clbits:
            qubit = dict(measures)[c]
            chars.append(str((idx >> qubit) & 1))
        key = "".join(reversed(chars)) if width else ""
        dist[key] = dist.get(key, 0.0) + p
    return dist


def _assert_counts_match(counts, dist, sigmas=5.0):
    shots = counts.shots_total
    for key in set(counts.counts) | set(dist):
        p = dist.get(key, 0.0)
        observed = counts.counts.get(key, 0)
        sigma = math.sqrt(max(p * (1 - p) * shots, 1.0))
        assert abs(observed - p * shots) <= sigmas * sigma + 1e-9, (
            key, observed, p * shots)


class TestSimulatorSampling:
    def test_x_gives_all_ones(self):
        circ = _measured_all(1, [GateOp("prx", (PI, 0.0), (0,))])
        counts = simulate_circuit(circ, 5, seed=1)
        assert counts.counts == {"1": 5}
        assert counts.shots_total == 5

    def test_bell_state_splits_evenly(self):
        ops = [GateOp("h", (), (0,)), GateOp("cx", (), (0, 1))]
        circ = _measured_all(2, ops)
        counts = simulate_circuit(circ, 100_000, seed=7)
        assert set(counts.counts) <= {"00", "11"}
        _assert_counts_match(counts, {"00": 0.5, "11": 0.5})

    def test_matches_unitary_oracle_on_fixed_circuits(self):
        cases = [
            [GateOp("rx", (0.7,), (0,)), GateOp("rz", (1.1,), (1,)),
             GateOp("cz", (), (0, 1)), GateOp("prx", (2.2, 0.4), (2,)),
             GateOp("rxx", (0.9,), (1, 2))],
            [GateOp("prx", (1.9, 2.8), (0,)), GateOp("rxx", (2.4,), (0, 1)),
             GateOp("rz", (-2.0,), (0,)), GateOp("cz", (), (1, 2)),
             GateOp("rx", (0.3,), (2,)), GateOp("rxx", (1.0,), (0, 2))],
        ]
        for ops in cases:
            circ = _measured_all(3, ops)
            counts = simulate_circuit(circ, 100_000, seed=13)
            _assert_counts_match(counts, _oracle_distribution(circ))

    def test_partial_measurement_marginalizes(self):
        ops = [GateOp("h", (), (0,)),
               GateOp("cx", (), (0, 1)),
               GateOp("measure", (), (1,), (0,))]
        circ = native_circuit(2, 1, ops, {0: 0, 1: 1})
        counts = simulate_circuit(circ, 40_000, seed=3)
        assert set(counts.counts) == {"0", "1"}
        _assert_counts_match(counts, _oracle_distribution(circ))

    def test_key_width_is_measured_clbits_not_register(self):
        ops = [GateOp("prx", (PI, 0.0), (0,)),
               GateOp("measure", (), (0,), (2,)),
               GateOp("measure", (), (1,), (0,))]
        circ = native_circuit(2, 5, ops, {0: 0, 1: 1})
        counts = simulate_circuit(circ, 50, seed=5)
        # clbit 2 (value 1) left of clbit 0 (value 0)
        assert counts.counts == {"10": 50}

    def test_no_measures_yields_empty_key(self):
        circ = native_circuit(1, 0, [GateOp("rx", (0.4,), (0,))], {0: 0})
        counts = simulate_circuit(circ, 9, seed=0)
        assert counts.counts == {"": 9}

    def test_same_seed_reproduces_counts(self):
        ops = [GateOp("prx", (1.0, 0.5), (0,)), GateOp("rxx", (0.8,), (0, 1))]
        circ = _measured_all(2, ops)
        a = simulate_circuit(circ, 4096, seed=42)
        b = simulate_circuit(circ, 4096, seed=42)
        assert a.counts == b.counts
        c = simulate_circuit(circ, 4096, seed=43)
        assert c.counts != a.counts  # overwhelmingly likely for 4096 shots

    def test_determinism_across_threads(self):
        ops = [GateOp("prx", (0.9, 0.1), (0,)), GateOp("cz", (), (0, 1))]
        circ = _measured_all(2, ops)
        results = [None] * 8
        def run(i):
            results[i] = simulate_circuit(circ, 2000, seed=99).counts
        threads = [threading.Thread(target=run, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == results[0] for r in results)

    def test_gate_after_measure_on_same_qubit_rejected(self):
        ops = [GateOp("measure", (), (0,), (0,)), GateOp("rx", (0.1,), (0,))]
        circ = native_circuit(1, 1, ops, {0: 0})
        with pytest.raises(ValidationError):
            simulate_circuit(circ, 10, seed=1)

    def test_cancel_event_aborts(self):
        event = threading.Event()
        event.set()
        ops = [GateOp("rx", (0.1,), (0,))] * 32
        circ = _measured_all(1, ops)
        with pytest.raises(Cancelled):
            simulate_circuit(circ, 10, seed=1, cancel=event)

    def test_too_wide_rejected(self):
        # the cap counts touched qubits, not the declared register width
        n = MAX_SIM_QUBITS + 1
        ops = [GateOp("rx", (0.1,), (q,)) for q in range(n)]
        circ = native_circuit(n, 0, ops, {q: q for q in range(n)})
        with pytest.raises(ValidationError):
            simulate_circuit(circ, 1, seed=0)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 64))
    @settings(max_examples=30, deadline=None)
    def test_counts_invariants_hold(self, seed, shots):
        ops = [GateOp("prx", (0.77, 1.3), (0,)), GateOp("rxx", (2.1,), (0, 1))]
        circ = _measured_all(2, ops)
        counts = simulate_circuit(circ, shots, seed=seed)
        assert sum(counts.counts.values()) == shots
        assert all(len(k) == 2 and set(k) <= {"0", "1"} for k in counts.counts)


class TestReadoutConfusion:
    def test_perfect_confusion_is_identity(self):
        ops = [GateOp("prx", (PI, 0.0), (0,))]
        circ = _measured_all(1, ops)
        counts = simulate_circuit(circ, 500, seed=2, confusion={0: (1.0, 1.0)})
        assert counts.counts == {"1": 500}

    def test_degenerate_confusion_reads_zero_always(self):
        # p(read 0 | 0) = 1 and p(read 1 | 1) = 0: every shot reads 0
        ops = [GateOp("prx", (PI, 0.0), (0,))]
        circ = _measured_all(1, ops)
        counts = simulate_circuit(circ, 500, seed=2, confusion={0: (1.0, 0.0)})
        assert counts.counts == {"0": 500}

    def test_symmetric_flip_rate_shows_up(self):
        circ = _measured_all(1, [])  # |0>, read 1 with prob 1 - p0g0
        counts = simulate_circuit(circ, 100_000, seed=11,
                                  confusion={0: (0.9, 0.9)})
        _assert_counts_match(counts, {"0": 0.9, "1": 0.1})

    def test_confusion_applies_per_qubit(self):
        ops = [GateOp("prx", (PI, 0.0), (1,))]
        circ = _measured_all(2, ops)
        counts = simulate_circuit(circ, 60_000, seed=8,
                                  confusion={0: (1.0, 1.0), 1: (0.8, 0.8)})
        # qubit 1 is in |1>: reads 1 with prob .8; qubit 0 reads 0 exactly
        _assert_counts_match(counts, {"10": 0.8, "00": 0.2})


class TestTelemetry:
    def _dev(self, **overrides):
        base = _profile("sc20")
        fields = {**vars(base), **overrides}
        return SimulatedDevice(DeviceProfile(**fields))

    def test_snapshot_constant_within_refresh_bucket(self):
        dev = SimulatedDevice(_profile())
        t0 = 1_000_000.0
        a = dev.telemetry(t0)
        b = dev.telemetry(t0 + dev._profile.refresh_interval_s * 0.9)
        assert a == b
        assert a.taken_at == a.calibrated_at

    def test_snapshot_changes_across_buckets(self):
        dev = SimulatedDevice(_profile())
        t0 = 1_000_000.0
        a = dev.telemetry(t0)
        b = dev.telemetry(t0 + dev._profile.refresh_interval_s * 1.1)
        assert b.taken_at > a.taken_at
        assert a.gate_fidelity != b.gate_fidelity

    def test_two_instances_agree(self):
        a = SimulatedDevice(_profile()).telemetry(5_000.0)
        b = SimulatedDevice(_profile()).telemetry(5_000.0)
        assert a == b

    def test_values_bounded_and_symmetric_confusion(self):
        dev = SimulatedDevice(_profile())
        snap = dev.telemetry(123_456.0)
        for value in snap.gate_fidelity.values():
            assert 0.0 <= value <= 1.0
        for q, value in snap.readout_fidelity.items():
            assert 0.0 <= value <= 1.0
            assert snap.confusion[q] == (value, value)
        assert snap.temperature_mk > 0.0

    def test_zero_drift_zero_noise_returns_bases(self):
        dev = self._dev(drift_amplitude=0.0, noise_sigma=0.0)
        snap = dev.telemetry(777.0)
        profile = dev._profile
        for (gate, qubits), value in snap.gate_fidelity.items():
            expected = (profile.base_fidelity_1q if len(qubits) == 1
                        else profile.base_fidelity_2q)
            assert value == pytest.approx(expected, abs=1e-12)
        for value in snap.readout_fidelity.values():
            assert value == pytest.approx(profile.base_readout_fidelity, abs=1e-12)
        assert snap.temperature_mk == pytest.approx(profile.base_temperature_mk)

    def test_t1_t2_constant_and_consistent(self):
        dev = SimulatedDevice(_profile())
        a = dev.telemetry(10.0)
        b = dev.telemetry(10_000.0)
        assert a.t1 == b.t1 and a.t2 == b.t2
        for q in a.t1:
            assert a.t2[q] <= 2.0 * a.t1[q] + 1e-12

    def test_covers_every_gate_qubit_and_edge(self):
        dev = SimulatedDevice(_profile())
        snap = dev.telemetry(0.0)
        props = dev.static_properties()
        for gate, arity in props.native_gates.items():
            if arity == 1:
                for q in range(props.num_qubits):
                    assert (gate, (q,)) in snap.gate_fidelity
            else:
                for a, b in props.coupling_map:
                    assert (gate, (a, b)) in snap.gate_fidelity
        assert set(snap.readout_fidelity) == set(range(props.num_qubits))


class TestProfiles:
    def test_builtin_profiles_shapes(self):
        by_id = {p.device_id: p for p in builtin_profiles()}
        assert set(by_id) == {"sc20", "ion5"}
        sc = by_id["sc20"].properties
        ion = by_id["ion5"].properties
        assert sc.num_qubits == 20 and ion.num_qubits == 5
        assert set(sc.native_gates) == {"prx", "cz"}
        assert set(ion.native_gates) == {"rx", "rz", "rxx"}
        assert len(ion.coupling_map) == 10  # all-to-all on 5 qubits
        for a, b in sc.coupling_map:
            assert a < b

    def test_margin_violation_rejected(self):
        data = vars(_profile())
        bad = {**data, "base_readout_fidelity": 0.999,
               "drift_amplitude": 0.01}
        with pytest.raises(ValueError):
            DeviceProfile(**bad)

    def test_profile_from_dict_roundtrip(self):
        profile = _profile("ion5")
        as_dict = {
            "device_id": profile.device_id,
            "display_name": profile.properties.display_name,
            "num_qubits": profile.properties.num_qubits,
            "native_gates": dict(profile.properties.native_gates),
            "coupling_map": [list(e) for e in profile.properties.coupling_map],
            "gate_durations": dict(profile.properties.gate_durations),
            "shot_overhead": profile.properties.shot_overhead,
            "setup_overhead": profile.properties.setup_overhead,
            "base_fidelity_1q": profile.base_fidelity_1q,
            "base_fidelity_2q": profile.base_fidelity_2q,
            "base_readout_fidelity": profile.base_readout_fidelity,
            "drift_amplitude": profile.drift_amplitude,
            "drift_period_s": profile.drift_period_s,
            "noise_sigma": profile.noise_sigma,
            "refresh_interval_s": profile.refresh_interval_s,
            "t1_s": profile.t1_s,
            "t2_s": profile.t2_s,
            "base_temperature_mk": profile.base_temperature_mk,
            "rng_seed": profile.rng_seed,
        }
        rebuilt = profile_from_dict(as_dict)
        assert rebuilt.properties == profile.properties
        assert rebuilt.rng_seed == profile.rng_seed


class TestSimulatedDevice:
    def test_executes_valid_program(self):
        dev = SimulatedDevice(_profile())
        program = "\n".join([
            "format ministack-native 1",
            "qubits 2",
            "clbits 2",
            "layout 0:0 1:1",
            f"prx {PI} 0 q0",
            "cz q0 q1",
            "measure q0 c0",
            "measure q1 c1",
        ])
        counts = dev.execute(program, 25, seed=4)
        assert counts.counts == {"01": 25}

    def test_rejects_offcoupling_program(self):
        dev = SimulatedDevice(_profile())
        program = "\n".join([
            "format ministack-native 1",
            "qubits 20",
            "clbits 0",
            "layout 0:0 1:7",
            "cz q0 q7",  # not an edge of the lattice
        ])
        with pytest.raises(ValidationError):
            dev.execute(program, 10, seed=0)

    def test_concurrent_execute_refused(self):
        dev = SimulatedDevice(_profile())
        # hold the execution slot as the registry worker would
        assert dev._exec_lock.acquire(blocking=False)
        try:
            program = "format ministack-native 1\nqubits 1\nclbits 0\nlayout 0:0\nrz 0.5 q0"
            with pytest.raises(RuntimeError):
                dev.execute(program, 5, seed=1)
        finally:
            dev._exec_lock.release()

    def test_simulate_program_matches_circuit_route(self):
        program = "\n".join([
            "format ministack-native 1",
            "qubits 1",
            "clbits 1",
            "layout 0:0",
            f"prx {PI} 0 q0",
            "measure q0 c0",
        ])
        counts = simulate_program(program, 11, seed=21)
        assert counts.counts == {"1": 11}
