"""End-to-end walkthrough: start the service, submit a Bell circuit over
HTTP, watch it through the lifecycle, and print the result envelope.

Runs self-contained on an ephemeral port; nothing to set up.
"""
import json
import threading
import time

import httpx
import uvicorn

from ministack.backends import SimulatedDevice, builtin_profiles
from ministack.devices.core import DeviceRegistry
from ministack.service import Orchestrator, ServiceConfig
from ministack.service.api import create_app

TOKEN = "demo-token"

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


def start_server(orch: Orchestrator) -> tuple[uvicorn.Server, threading.Thread, str]:
    server = uvicorn.Server(uvicorn.Config(
        create_app(orch), host="127.0.0.1", port=0, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    return server, thread, f"http://127.0.0.1:{port}"


def main() -> None:
    registry = DeviceRegistry([TOKEN])
    for profile in builtin_profiles():
        registry.register_device(SimulatedDevice(profile))
    orch = Orchestrator(registry, ServiceConfig())
    server, thread, base = start_server(orch)
    print(f"service up at {base}\n")

    try:
        with httpx.Client(base_url=base, timeout=10.0) as http:
            session = http.post("/v1/sessions", json={"token": TOKEN}).json()
            headers = {"Authorization": f"Bearer {session['session_id']}"}
            print(f"session {session['session_id'][:8]}… open")

            print("\ndevices:")
            for dev in http.get("/v1/devices", headers=headers).json():
                merit = dev["fomac"]
                print(f"  {dev['device_id']:5s} {dev['num_qubits']:3d} qubits  "
                      f"healthy={merit['healthy']}  "
                      f"1q fid {merit['avg_fidelity_1q']:.4f}  "
                      f"2q fid {merit['avg_fidelity_2q']:.4f}  "
                      f"wait {dev['est_wait_s']:.2f}s")

            job = http.post("/v1/jobs", headers=headers, json={
                "circuit": BELL, "shots": 10_000, "seed": 2025,
                "mitigate": True}).json()
            job_id = job["job_id"]
            print(f"\nsubmitted {job_id}")

            last = None
            while True:
                view = http.get(f"/v1/jobs/{job_id}", headers=headers).json()
                if view["state"] != last:
                    print(f"  state -> {view['state']}")
                    last = view["state"]
                if view["state"] in ("DONE", "FAILED", "CANCELLED"):
                    break
                time.sleep(0.1)

            envelope = http.get(f"/v1/jobs/{job_id}/result",
                                headers=headers).json()
            meta = envelope["metadata"]
            print(f"\nran on {meta['device_id']} "
                  f"(calibrated_at {meta['calibrated_at']:.0f}, "
                  f"seed {meta['seed']})")
            stats = meta["compile_stats"]
            print(f"compile: {stats['gate_count_before']} -> "
                  f"{stats['gate_count_after']} gates, "
                  f"{stats['swap_count']} swaps, "
                  f"passes {stats['pipeline']}")
            print("\nhistogram:")
            for key in sorted(envelope["histogram"]):
                bar = "#" * round(60 * envelope["histogram"][key])
                print(f"  {key}  {envelope['histogram'][key]:6.4f}  {bar}")
            if envelope["mitigated_histogram"]:
                print("mitigated:")
                for key in sorted(envelope["mitigated_histogram"]):
                    p = envelope["mitigated_histogram"][key]
                    print(f"  {key}  {p:6.4f}  {'#' * round(60 * p)}")
            print("\nfull envelope metadata:")
            print(json.dumps(meta, indent=2))
    finally:
        server.should_exit = True
        thread.join(timeout=5)
        orch.close()
        registry.close()


if __name__ == "__main__":
    main()
