"""Record live API responses as JSON fixtures for dashboard contract tests.

Starts an ephemeral service with the builtin simulated devices, walks the
endpoints a dashboard touches, and writes each response body (plus status)
under --out. Re-run after changing the API surface.
"""
import argparse
import json
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from ministack.backends.plugin import SimulatedDevice
from ministack.backends.profiles import builtin_profiles
from ministack.devices.core import DeviceRegistry
from ministack.service import Orchestrator, ServiceConfig
from ministack.service.api import create_app

TOKEN = "fixture-token"

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


def start_service() -> tuple[uvicorn.Server, threading.Thread, str, Orchestrator, DeviceRegistry]:
    registry = DeviceRegistry([TOKEN])
    for profile in builtin_profiles():
        registry.register_device(SimulatedDevice(profile))
    orch = Orchestrator(registry, ServiceConfig())
    config = uvicorn.Config(create_app(orch), host="127.0.0.1", port=0,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    return server, thread, f"http://127.0.0.1:{port}", orch, registry


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="frontend/tests/fixtures",
                        help="directory for the recorded fixtures")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    server, thread, base, orch, registry = start_service()
    recorded: dict[str, tuple[int, object]] = {}
    try:
        with httpx.Client(base_url=base) as http:
            def record(name: str, resp: httpx.Response) -> dict:
                recorded[name] = (resp.status_code, resp.json())
                return resp.json()

            session = record("session", http.post("/v1/sessions",
                                                  json={"token": TOKEN}))
            auth = {"Authorization": f"Bearer {session['session_id']}"}

            record("devices", http.get("/v1/devices", headers=auth))
            record("device_sc20", http.get("/v1/devices/sc20", headers=auth))
            record("telemetry_sc20",
                   http.get("/v1/devices/sc20/telemetry", headers=auth))

            submitted = record("job_submitted", http.post(
                "/v1/jobs", headers=auth,
                json={"circuit": BELL, "shots": 2000, "seed": 11,
                      "mitigate": True}))
            job_id = submitted["job_id"]
            deadline = time.time() + 30
            while time.time() < deadline:
                view = http.get(f"/v1/jobs/{job_id}", headers=auth).json()
                if view["state"] in ("DONE", "FAILED", "CANCELLED"):
                    break
                time.sleep(0.05)
            record("job_done", http.get(f"/v1/jobs/{job_id}", headers=auth))
            record("result", http.get(f"/v1/jobs/{job_id}/result", headers=auth))
            record("jobs_list", http.get("/v1/jobs", headers=auth))

            record("error_bad_token", http.post("/v1/sessions",
                                                json={"token": "wrong"}))
            record("error_unknown_job",
                   http.get("/v1/jobs/0000000000000-000000", headers=auth))
            record("error_bad_circuit", http.post(
                "/v1/jobs", headers=auth,
                json={"circuit": "OPENQASM 2.0; qreg q[", "shots": 10}))
            record("error_unauthorized", http.get("/v1/devices", headers={
                "Authorization": "Bearer not-a-session"}))
    finally:
        server.should_exit = True
        thread.join(timeout=5)
        orch.close()
        registry.close()

    for name, (status, body) in recorded.items():
        path = out / f"{name}.json"
        path.write_text(json.dumps({"status": status, "body": body},
                                   indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path} (status {status})")


if __name__ == "__main__":
    main()
