"""Service layer: mitigation math, config, orchestration, and the HTTP API."""
import json
import math
import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings, strategies as st

from ministack.backends import SimulatedDevice, builtin_profiles
from ministack.circuits import CircuitSyntaxError
from ministack.devices.core import DeviceRegistry
from ministack.devices.errors import (
    AlreadyTerminal,
    Cancelled,
    NotDone,
    UnknownDevice,
    UnknownJob,
)
from ministack.devices.types import Counts, DeviceProperties, TelemetrySnapshot
from ministack.fomac import HealthLimits
from ministack.scheduling.selection import NoHealthyDevice, SchedulingPolicy
from ministack.service import (
    Orchestrator,
    ServiceConfig,
    SingularConfusion,
    SubmissionRequest,
    config_from_mapping,
    confusions_for,
    load_config,
    mitigated_histogram,
    raw_histogram,
)
from ministack.service.api import create_app

TOKEN = "team-token"

BELL = """
OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0], q[1];
measure q[0] -> c[0];
measure q[1] -> c[1];
"""

ONE_Q = """
OPENQASM 2.0;
qreg q[1];
creg c[1];
h q[0];
measure q[0] -> c[0];
"""


def _forward_2x2(p0: float, p1: float) -> np.ndarray:
    return np.array([[p0, 1.0 - p1], [1.0 - p0, p1]])


# -- mitigation ---------------------------------------------------------------


class TestMitigation:
    def test_raw_histogram(self):
        hist = raw_histogram(Counts({"00": 500, "11": 500}, 1000))
        assert hist == {"00": 0.5, "11": 0.5}

    def test_identity_confusion_is_noop(self):
        counts = Counts({"00": 700, "01": 200, "11": 100}, 1000)
        out = mitigated_histogram(counts, [(1.0, 1.0), (1.0, 1.0)])
        for key, p in raw_histogram(counts).items():
            assert out[key] == pytest.approx(p, abs=1e-12)

    def test_singular_confusion_raises(self):
        with pytest.raises(SingularConfusion):
            mitigated_histogram(Counts({"0": 5, "1": 5}, 10), [(0.3, 0.7)])

    def test_round_trip_recovers_ideal(self):
        # ideal outcome is always "0"; readout flips it with probability 0.1
        shots = 100_000
        rng = np.random.default_rng(42)
        flips = int(rng.binomial(shots, 0.1))
        counts = Counts({"0": shots - flips, "1": flips}, shots)
        out = mitigated_histogram(counts, [(0.9, 0.9)])
        sigma = math.sqrt(0.9 * 0.1 / shots) / abs(0.9 + 0.9 - 1.0)
        assert abs(out.get("0", 0.0) - 1.0) <= 3 * sigma

    def test_matches_dense_kron_oracle(self):
        confusions = [(0.9, 0.85), (0.95, 0.9), (0.8, 0.97)]  # ranks 0..2
        rng = np.random.default_rng(3)
        raw = rng.integers(0, 500, size=8)
        counts = Counts(
            {np.binary_repr(i, width=3): int(n) for i, n in enumerate(raw) if n},
            int(raw.sum()))

        dense = np.kron(_forward_2x2(*confusions[2]),
                        np.kron(_forward_2x2(*confusions[1]),
                                _forward_2x2(*confusions[0])))
        vec = np.zeros(8)
        for key, n in counts.counts.items():
            vec[int(key, 2)] = n / counts.shots_total
        expect = np.clip(np.linalg.solve(dense, vec), 0.0, None)
        expect /= expect.sum()

        out = mitigated_histogram(counts, confusions)
        for i in range(8):
            key = np.binary_repr(i, width=3)
            assert out.get(key, 0.0) == pytest.approx(expect[i], abs=1e-12)

    def test_width_cap(self):
        counts = Counts({"0" * 17: 3}, 3)
        with pytest.raises(ValueError, match="capped"):
            mitigated_histogram(counts, [(0.9, 0.9)] * 17)

    def test_confusion_count_mismatch(self):
        with pytest.raises(ValueError, match="width"):
            mitigated_histogram(Counts({"00": 1}, 1), [(0.9, 0.9)])

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=1000), min_size=4, max_size=4),
        st.lists(st.tuples(st.floats(min_value=0.6, max_value=1.0),
                           st.floats(min_value=0.6, max_value=1.0)),
                 min_size=2, max_size=2),
    )
    def test_output_is_a_distribution(self, raw, confusions):
        if sum(raw) == 0:
            raw[0] = 1
        counts = Counts(
            {np.binary_repr(i, width=2): n for i, n in enumerate(raw) if n},
            sum(raw))
        out = mitigated_histogram(counts, confusions)
        assert all(p > 0.0 for p in out.values())
        assert sum(out.values()) == pytest.approx(1.0, abs=1e-9)

    def test_confusions_for_orders_by_clbit(self):
        from ministack.circuits import native_circuit, GateOp

        circ = native_circuit(3, 2, ops=(
            GateOp("measure", (), (2,), (1,)),
            GateOp("measure", (), (0,), (0,)),
        ), layout={0: 0, 1: 1, 2: 2})
        now = time.time()
        snap = TelemetrySnapshot(
            device_id="d", taken_at=now, gate_fidelity={}, t1={}, t2={},
            readout_fidelity={}, confusion={0: (0.9, 0.8)},
            temperature_mk=10.0, calibrated_at=now)
        pairs = confusions_for(circ, snap)
        assert pairs == [(0.9, 0.8), (1.0, 1.0)]  # clbit 0 first, qubit 2 defaulted


# -- config ---------------------------------------------------------------------


class TestConfig:
    def test_defaults(self):
        cfg = config_from_mapping({})
        assert cfg.host == "127.0.0.1"
        assert cfg.limits == HealthLimits()
        assert cfg.default_policy == SchedulingPolicy()

    def test_fomac_keys(self):
        cfg = config_from_mapping({
            "fomac.max_temperature_mk": 25.0,
            "fomac.max_calibration_age_s": 3600.0,
        })
        assert cfg.limits.max_temperature_mk == 25.0
        assert cfg.limits.max_calibration_age_s == 3600.0

    def test_policy_keys(self):
        cfg = config_from_mapping({
            "policy.w_esp": 0.2, "policy.w_wait": 0.2, "policy.w_exec": 0.6})
        assert cfg.default_policy.w_exec == 0.6

    def test_partial_policy_weights_must_still_sum(self):
        with pytest.raises(ValueError):
            config_from_mapping({"policy.w_esp": 0.9})

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            config_from_mapping({"fomac.max_temperature": 10})

    def test_invalid_cidr_rejected(self):
        with pytest.raises(ValueError):
            config_from_mapping({"local.cidrs": ["10.0.0.0/40"]})

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(json.dumps({
            "listen.port": 9001,
            "local.cidrs": ["10.0.0.0/8", "192.168.0.0/16"],
            "limits.max_shots": 5000,
        }))
        cfg = load_config(str(path))
        assert cfg.port == 9001
        assert cfg.local_cidrs == ("10.0.0.0/8", "192.168.0.0/16")
        assert cfg.max_shots == 5000

    def test_non_object_root_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[1, 2]")
        with pytest.raises(ValueError, match="object"):
            load_config(str(path))


# -- scripted plugin for fault paths ---------------------------------------------


class ScriptedPlugin:
    """Two-qubit device whose execute behavior is scripted per instance."""

    def __init__(self, device_id: str, behavior: str = "ok"):
        self.device_id = device_id
        self.behavior = behavior
        self.release = threading.Event()

    def static_properties(self) -> DeviceProperties:
        return DeviceProperties(
            device_id=self.device_id, display_name=f"scripted {self.device_id}",
            num_qubits=2, native_gates={"prx": 1, "cz": 2},
            coupling_map=((0, 1),),
            gate_durations={"prx": 1e-6, "cz": 2e-6},
            shot_overhead=1e-5, setup_overhead=0.0)

    def telemetry(self, now=None) -> TelemetrySnapshot:
        now = time.time() if now is None else now
        return TelemetrySnapshot(
            device_id=self.device_id, taken_at=now,
            gate_fidelity={("prx", (0,)): 0.99, ("prx", (1,)): 0.99,
                           ("cz", (0, 1)): 0.98},
            t1={0: 1e-4, 1: 1e-4}, t2={0: 1e-4, 1: 1e-4},
            readout_fidelity={0: 0.97, 1: 0.97},
            confusion={0: (0.97, 0.97), 1: (0.97, 0.97)},
            temperature_mk=10.0, calibrated_at=now)

    def execute(self, program, shots, seed, cancel=None):
        if self.behavior == "fail":
            raise RuntimeError("scripted failure")
        if self.behavior == "hold":
            released = self.release.wait(timeout=30.0)
            if cancel is not None and cancel.is_set():
                raise Cancelled("scripted hold cancelled")
            if not released:
                raise RuntimeError("hold never released")
        return Counts({"0": shots}, shots)


def _make_stack(tmp_path=None, *, extra_plugins=(), config=None, synchronous=True):
    registry = DeviceRegistry([TOKEN])
    for profile in builtin_profiles():
        registry.register_device(SimulatedDevice(profile))
    for plugin in extra_plugins:
        registry.register_device(plugin)
    orch = Orchestrator(registry, config or ServiceConfig(), synchronous=synchronous)
    return registry, orch


def _wait_terminal(orch, job_id, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        view = orch.job_view(job_id)
        if view["state"] in ("DONE", "FAILED", "CANCELLED"):
            return view
        time.sleep(0.01)
    raise AssertionError(f"{job_id} still {view['state']} after {timeout}s")


@pytest.fixture()
def stack():
    registry, orch = _make_stack()
    try:
        yield registry, orch
    finally:
        orch.close()
        registry.close()


# -- origin detection --------------------------------------------------------------


class TestOrigin:
    def test_cidr_match(self, stack):
        registry, _ = stack
        orch = Orchestrator(registry, ServiceConfig(local_cidrs=("10.0.0.0/8",)))
        assert orch.detect_origin("10.1.2.3", {}) == "LOCAL"
        assert orch.detect_origin("8.8.8.8", {}) == "REMOTE"

    def test_unparseable_source_is_remote(self, stack):
        _, orch = stack
        assert orch.detect_origin("testclient", {}) == "REMOTE"
        assert orch.detect_origin(None, {}) == "REMOTE"

    def test_gateway_header_wins(self, stack):
        _, orch = stack
        assert orch.detect_origin("8.8.8.8", {"X-Internal-Gateway": "1"}) == "LOCAL"


# -- orchestration ---------------------------------------------------------------


class TestOrchestrator:
    def test_bell_end_to_end(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(BELL, shots=400))
        view = _wait_terminal(orch, job_id)
        assert view["state"] == "DONE"
        assert view["device_id"] in ("sc20", "ion5")

        envelope = orch.result_envelope(job_id)
        assert envelope["shots"] == 400
        assert sum(envelope["histogram"].values()) == pytest.approx(1.0, abs=1e-9)
        assert set(envelope["counts"]) <= {"00", "01", "10", "11"}
        meta = envelope["metadata"]
        assert meta["device_id"] == view["device_id"]
        assert meta["calibrated_at"] <= view["timestamps"]["RUNNING"]
        assert meta["compile_stats"]["gate_count_after"] >= 1
        assert meta["policy_weights"] == {"w_esp": 0.5, "w_wait": 0.3, "w_exec": 0.2}
        assert isinstance(meta["seed"], int)

    def test_device_override(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(
            BELL, shots=100, device_override="ion5"))
        view = _wait_terminal(orch, job_id)
        assert view["state"] == "DONE"
        assert view["device_id"] == "ion5"

    def test_parse_error_is_synchronous(self, stack):
        registry, orch = stack
        sid = orch.open_session(TOKEN)
        before = len(registry.jobs())
        with pytest.raises(CircuitSyntaxError):
            orch.submit(sid, SubmissionRequest("OPENQASM 2.0; qreg q[", shots=10))
        assert len(registry.jobs()) == before

    def test_unknown_override_is_synchronous(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        with pytest.raises(UnknownDevice):
            orch.submit(sid, SubmissionRequest(BELL, shots=10,
                                               device_override="nope"))

    def test_no_healthy_device_rejects(self):
        cold = ServiceConfig(limits=HealthLimits(max_temperature_mk=1.0))
        registry, orch = _make_stack(config=cold)
        try:
            sid = orch.open_session(TOKEN)
            with pytest.raises(NoHealthyDevice):
                orch.submit(sid, SubmissionRequest(BELL, shots=10))
        finally:
            orch.close()
            registry.close()

    def test_local_priority_boost_and_cap(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        boosted = orch.submit(sid, SubmissionRequest(
            ONE_Q, shots=10, priority=5, origin="LOCAL"))
        assert orch.job_view(boosted)["priority"] == 6
        capped = orch.submit(sid, SubmissionRequest(
            ONE_Q, shots=10, priority=9, origin="LOCAL"))
        assert orch.job_view(capped)["priority"] == 9
        remote = orch.submit(sid, SubmissionRequest(ONE_Q, shots=10, priority=5))
        assert orch.job_view(remote)["priority"] == 5

    def test_missing_seed_gets_stored_value(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(ONE_Q, shots=10))
        assert isinstance(orch.job_view(job_id)["seed"], int)

    def test_seed_pinning_reproduces_counts(self, stack):
        registry, orch = stack
        sid = orch.open_session(TOKEN)
        ids = [orch.submit(sid, SubmissionRequest(
                   BELL, shots=300, seed=1234, device_override="sc20"))
               for _ in range(2)]
        envs = []
        for job_id in ids:
            assert _wait_terminal(orch, job_id)["state"] == "DONE"
            envs.append(orch.result_envelope(job_id))
        assert envs[0]["counts"] == envs[1]["counts"]

        # the service path adds nothing: the same program and seed replayed
        # directly on the plugin give exactly the same counts
        record = registry.job_record(ids[0])
        direct = SimulatedDevice(builtin_profiles()[0]).execute(
            record.program, 300, 1234)
        assert direct.counts == envs[0]["counts"]

    def test_plugin_failure_lands_in_failed(self, stack):
        del stack
        plugin = ScriptedPlugin("flaky", behavior="fail")
        registry, orch = _make_stack(extra_plugins=[plugin])
        try:
            sid = orch.open_session(TOKEN)
            job_id = orch.submit(sid, SubmissionRequest(
                ONE_Q, shots=10, device_override="flaky"))
            view = _wait_terminal(orch, job_id)
            assert view["state"] == "FAILED"
            assert "RuntimeError" in view["error"]
        finally:
            orch.close()
            registry.close()

    def test_compile_failure_lands_in_failed(self, stack):
        del stack
        plugin = ScriptedPlugin("tiny")
        registry, orch = _make_stack(extra_plugins=[plugin])
        try:
            sid = orch.open_session(TOKEN)
            wide = ("OPENQASM 2.0;\nqreg q[3];\ncreg c[3];\n"
                    "cx q[0], q[2];\nmeasure q[0] -> c[0];\n")
            job_id = orch.submit(sid, SubmissionRequest(
                wide, shots=10, device_override="tiny"))
            view = _wait_terminal(orch, job_id)
            assert view["state"] == "FAILED"
            assert view["error"]
        finally:
            orch.close()
            registry.close()

    def test_cancel_held_job(self, stack):
        del stack
        plugin = ScriptedPlugin("held", behavior="hold")
        registry, orch = _make_stack(extra_plugins=[plugin])
        try:
            sid = orch.open_session(TOKEN)
            job_id = orch.submit(sid, SubmissionRequest(
                ONE_Q, shots=10, device_override="held"))
            deadline = time.time() + 10
            while (orch.job_view(job_id)["state"] not in ("QUEUED", "RUNNING")
                   and time.time() < deadline):
                time.sleep(0.01)
            orch.cancel(job_id)
            plugin.release.set()
            view = _wait_terminal(orch, job_id)
            assert view["state"] == "CANCELLED"
            with pytest.raises(NotDone):
                orch.result_envelope(job_id)
        finally:
            plugin.release.set()
            orch.close()
            registry.close()

    def test_mitigated_histogram_in_envelope(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(
            ONE_Q, shots=200, mitigate_readout=True, device_override="sc20"))
        assert _wait_terminal(orch, job_id)["state"] == "DONE"
        envelope = orch.result_envelope(job_id)
        mit = envelope["mitigated_histogram"]
        assert mit is not None
        assert sum(mit.values()) == pytest.approx(1.0, abs=1e-9)

    def test_result_reads_are_idempotent(self, stack):
        _, orch = stack
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(ONE_Q, shots=50, seed=9))
        _wait_terminal(orch, job_id)
        assert orch.result_envelope(job_id) == orch.result_envelope(job_id)

    def test_job_log_replay_marks_failed(self, tmp_path):
        log = tmp_path / "jobs.jsonl"
        cfg = ServiceConfig(job_log_path=str(log))
        registry, orch = _make_stack(config=cfg)
        sid = orch.open_session(TOKEN)
        job_id = orch.submit(sid, SubmissionRequest(ONE_Q, shots=20, seed=4))
        _wait_terminal(orch, job_id)
        orch.close()
        registry.close()

        registry2, orch2 = _make_stack(config=cfg)
        try:
            view = orch2.job_view(job_id)
            assert view["state"] == "FAILED"
            assert "restart" in view["error"]
            with pytest.raises(UnknownJob):
                orch2.result_envelope(job_id)
            with pytest.raises(AlreadyTerminal):
                orch2.cancel(job_id)
            assert any(v["job_id"] == job_id for v in orch2.list_jobs())
        finally:
            orch2.close()
            registry2.close()

    def test_device_views(self, stack):
        _, orch = stack
        listed = orch.list_devices()
        assert [d["device_id"] for d in listed] == ["ion5", "sc20"]
        assert all(d["fomac"]["healthy"] for d in listed)
        detail = orch.device_detail("sc20")
        assert detail["gate_durations"]["cz"] == pytest.approx(8e-8)
        telem = orch.device_telemetry("ion5")
        assert telem["device_id"] == "ion5"
        assert telem["gate_fidelity"]


# -- HTTP API ----------------------------------------------------------------------


@pytest.fixture()
def api():
    registry, orch = _make_stack(synchronous=False)
    client = TestClient(create_app(orch))
    try:
        yield client, orch
    finally:
        orch.close()
        registry.close()


def _open(client) -> dict:
    resp = client.post("/v1/sessions", json={"token": TOKEN})
    assert resp.status_code == 200
    return {"Authorization": f"Bearer {resp.json()['session_id']}"}


def _poll_terminal(client, headers, job_id, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        view = client.get(f"/v1/jobs/{job_id}", headers=headers).json()
        if view["state"] in ("DONE", "FAILED", "CANCELLED"):
            return view
        time.sleep(0.02)
    raise AssertionError(f"job stuck in {view['state']}")


class TestApi:
    def test_bad_token_is_401(self, api):
        client, _ = api
        assert client.post("/v1/sessions", json={"token": "wrong"}).status_code == 401

    def test_missing_or_bad_bearer_is_401(self, api):
        client, _ = api
        assert client.get("/v1/devices").status_code == 401
        bad = {"Authorization": "Bearer not-a-session"}
        assert client.get("/v1/devices", headers=bad).status_code == 401

    def test_device_endpoints(self, api):
        client, _ = api
        headers = _open(client)
        listed = client.get("/v1/devices", headers=headers)
        assert listed.status_code == 200
        assert {d["device_id"] for d in listed.json()} == {"ion5", "sc20"}
        detail = client.get("/v1/devices/sc20", headers=headers)
        assert detail.status_code == 200
        assert detail.json()["num_qubits"] == 20
        telem = client.get("/v1/devices/sc20/telemetry", headers=headers)
        assert telem.status_code == 200
        assert "gate_fidelity" in telem.json()
        assert client.get("/v1/devices/nope", headers=headers).status_code == 404

    def test_submit_and_fetch_result(self, api):
        client, _ = api
        headers = _open(client)
        resp = client.post("/v1/jobs", headers=headers, json={
            "circuit": BELL, "shots": 300, "seed": 77})
        assert resp.status_code == 200
        job_id = resp.json()["job_id"]

        view = _poll_terminal(client, headers, job_id)
        assert view["state"] == "DONE"
        result = client.get(f"/v1/jobs/{job_id}/result", headers=headers)
        assert result.status_code == 200
        envelope = result.json()
        assert envelope["metadata"]["seed"] == 77
        assert sum(envelope["histogram"].values()) == pytest.approx(1.0, abs=1e-9)
        assert sum(envelope["counts"].values()) == 300

    def test_job_listing(self, api):
        client, _ = api
        headers = _open(client)
        job_id = client.post("/v1/jobs", headers=headers, json={
            "circuit": ONE_Q, "shots": 20}).json()["job_id"]
        _poll_terminal(client, headers, job_id)
        listed = client.get("/v1/jobs", headers=headers).json()
        assert any(v["job_id"] == job_id for v in listed)

    def test_bad_circuit_is_400(self, api):
        client, _ = api
        headers = _open(client)
        resp = client.post("/v1/jobs", headers=headers, json={
            "circuit": "OPENQASM 2.0; nope q[0];", "shots": 10})
        assert resp.status_code == 400

    def test_malformed_body_is_400(self, api):
        client, _ = api
        headers = _open(client)
        assert client.post("/v1/jobs", headers=headers,
                           json={"shots": 10}).status_code == 400

    def test_zero_shots_is_400(self, api):
        client, _ = api
        headers = _open(client)
        resp = client.post("/v1/jobs", headers=headers, json={
            "circuit": ONE_Q, "shots": 0})
        assert resp.status_code == 400

    def test_bad_policy_weights_are_400(self, api):
        client, _ = api
        headers = _open(client)
        resp = client.post("/v1/jobs", headers=headers, json={
            "circuit": ONE_Q, "shots": 10,
            "policy": {"w_esp": 0.9, "w_wait": 0.9, "w_exec": 0.9}})
        assert resp.status_code == 400

    def test_unknown_job_is_404(self, api):
        client, _ = api
        headers = _open(client)
        assert client.get("/v1/jobs/absent", headers=headers).status_code == 404

    def test_result_before_done_is_409(self, api):
        del api
        plugin = ScriptedPlugin("held", behavior="hold")
        registry, orch = _make_stack(extra_plugins=[plugin], synchronous=False)
        client = TestClient(create_app(orch))
        try:
            headers = _open(client)
            job_id = client.post("/v1/jobs", headers=headers, json={
                "circuit": ONE_Q, "shots": 10, "device": "held"}).json()["job_id"]
            deadline = time.time() + 10
            while time.time() < deadline:
                state = client.get(f"/v1/jobs/{job_id}", headers=headers).json()["state"]
                if state in ("QUEUED", "RUNNING"):
                    break
                time.sleep(0.01)
            resp = client.get(f"/v1/jobs/{job_id}/result", headers=headers)
            assert resp.status_code == 409

            cancel = client.delete(f"/v1/jobs/{job_id}", headers=headers)
            assert cancel.status_code == 200
            plugin.release.set()
            view = _poll_terminal(client, headers, job_id)
            assert view["state"] == "CANCELLED"
            again = client.delete(f"/v1/jobs/{job_id}", headers=headers)
            assert again.status_code == 409
        finally:
            plugin.release.set()
            orch.close()
            registry.close()

    def test_no_healthy_device_is_503(self):
        cold = ServiceConfig(limits=HealthLimits(max_temperature_mk=1.0))
        registry, orch = _make_stack(config=cold, synchronous=False)
        client = TestClient(create_app(orch))
        try:
            headers = _open(client)
            resp = client.post("/v1/jobs", headers=headers, json={
                "circuit": ONE_Q, "shots": 10})
            assert resp.status_code == 503
        finally:
            orch.close()
            registry.close()

    def test_mitigate_flag_round_trips(self, api):
        client, _ = api
        headers = _open(client)
        job_id = client.post("/v1/jobs", headers=headers, json={
            "circuit": ONE_Q, "shots": 100, "mitigate": True,
            "device": "sc20"}).json()["job_id"]
        assert _poll_terminal(client, headers, job_id)["state"] == "DONE"
        envelope = client.get(f"/v1/jobs/{job_id}/result", headers=headers).json()
        assert envelope["mitigated_histogram"] is not None
