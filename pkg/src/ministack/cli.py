"""Command-line client for the orchestration service.

Connection settings resolve flags first, then MINISTACK_ENDPOINT and
MINISTACK_TOKEN, then the per-user config file. Each invocation opens a
fresh session and leaves it open; sessions are cheap registry rows and the
service reaps work through job terminal states, not session closure.

Exit codes: 0 success (watch: job DONE), 1 API error or FAILED/CANCELLED,
2 usage error.
"""
from __future__ import annotations

import json
import os
import sys
import time
from typing import Optional

import click
import httpx

CONFIG_PATH = os.path.expanduser("~/.config/ministack/cli.json")

WATCH_INTERVAL_S = 0.5


def _file_config() -> dict:
    try:
        with open(CONFIG_PATH, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        return {}


def _resolve(flag: Optional[str], env: str, key: str) -> Optional[str]:
    if flag:
        return flag
    if os.environ.get(env):
        return os.environ[env]
    value = _file_config().get(key)
    return str(value) if value is not None else None


class ServiceClient:
    def __init__(self, endpoint: str, token: str):
        self._http = httpx.Client(base_url=endpoint.rstrip("/"), timeout=10.0)
        self._token = token
        self._headers: Optional[dict] = None

    def _auth(self) -> dict:
        if self._headers is None:
            resp = self._http.post("/v1/sessions", json={"token": self._token})
            _fail_on_error(resp)
            self._headers = {
                "Authorization": f"Bearer {resp.json()['session_id']}"}
        return self._headers

    def get(self, path: str) -> httpx.Response:
        resp = self._http.get(path, headers=self._auth())
        _fail_on_error(resp)
        return resp

    def post(self, path: str, body: dict) -> httpx.Response:
        resp = self._http.post(path, json=body, headers=self._auth())
        _fail_on_error(resp)
        return resp

    def delete(self, path: str) -> httpx.Response:
        resp = self._http.delete(path, headers=self._auth())
        _fail_on_error(resp)
        return resp


def _fail_on_error(resp: httpx.Response) -> None:
    if resp.status_code >= 400:
        click.echo(resp.text, err=True)
        sys.exit(1)


def _emit(resp: httpx.Response, output: str) -> None:
    if output == "json":
        # exactly the API body; reserializing would reorder or reformat
        sys.stdout.buffer.write(resp.content)
        sys.stdout.buffer.flush()
    else:
        _print_table(resp.json())


def _print_table(data) -> None:
    if isinstance(data, list):
        for item in data:
            _print_table(item)
            click.echo()
        return
    if isinstance(data, dict):
        width = max((len(k) for k in data), default=0)
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
            click.echo(f"{key:<{width}}  {value}")
        return
    click.echo(str(data))


@click.group()
@click.option("--endpoint", help="service base URL")
@click.option("--token", help="access token from the allow-list")
@click.option("--output", type=click.Choice(["table", "json"]), default=None)
@click.pass_context
def main(ctx: click.Context, endpoint: Optional[str], token: Optional[str],
         output: Optional[str]) -> None:
    endpoint = _resolve(endpoint, "MINISTACK_ENDPOINT", "endpoint")
    token = _resolve(token, "MINISTACK_TOKEN", "token")
    output = output or _resolve(None, "MINISTACK_OUTPUT", "output") or "table"
    if not endpoint:
        raise click.UsageError(
            "no endpoint: pass --endpoint, set MINISTACK_ENDPOINT, "
            f"or add 'endpoint' to {CONFIG_PATH}")
    if not token:
        raise click.UsageError(
            "no token: pass --token, set MINISTACK_TOKEN, "
            f"or add 'token' to {CONFIG_PATH}")
    ctx.obj = {"client": ServiceClient(endpoint, token), "output": output}


@main.command()
@click.pass_obj
def devices(obj) -> None:
    """List registered devices with health and queue state."""
    _emit(obj["client"].get("/v1/devices"), obj["output"])


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--shots", type=int, default=1000, show_default=True)
@click.option("--priority", type=int, default=0, show_default=True)
@click.option("--device", help="bypass selection, run on this device")
@click.option("--policy", help="weights as w_esp,w_wait,w_exec")
@click.option("--mitigate", is_flag=True, help="request readout mitigation")
@click.option("--seed", type=int, help="pin the sampling seed")
@click.pass_obj
def submit(obj, circuit_file: str, shots: int, priority: int,
           device: Optional[str], policy: Optional[str],
           mitigate: bool, seed: Optional[int]) -> None:
    """Submit a circuit file; prints the job id."""
    with open(circuit_file, encoding="utf-8") as f:
        circuit = f.read()
    body: dict = {"circuit": circuit, "shots": shots, "priority": priority,
                  "mitigate": mitigate}
    if device:
        body["device"] = device
    if seed is not None:
        body["seed"] = seed
    if policy:
        parts = policy.split(",")
        if len(parts) != 3:
            raise click.UsageError("--policy needs exactly w_esp,w_wait,w_exec")
        try:
            w = [float(p) for p in parts]
        except ValueError as exc:
            raise click.UsageError(f"--policy weights must be numbers: {exc}")
        body["policy"] = {"w_esp": w[0], "w_wait": w[1], "w_exec": w[2]}
    resp = obj["client"].post("/v1/jobs", body)
    if obj["output"] == "json":
        _emit(resp, "json")
    else:
        click.echo(resp.json()["job_id"])


@main.command()
@click.argument("job_id")
@click.pass_obj
def status(obj, job_id: str) -> None:
    """Show a job record."""
    _emit(obj["client"].get(f"/v1/jobs/{job_id}"), obj["output"])


@main.command()
@click.argument("job_id")
@click.pass_obj
def result(obj, job_id: str) -> None:
    """Fetch the result envelope of a DONE job."""
    _emit(obj["client"].get(f"/v1/jobs/{job_id}/result"), obj["output"])


@main.command()
@click.argument("job_id")
@click.pass_obj
def cancel(obj, job_id: str) -> None:
    """Cancel a non-terminal job."""
    _emit(obj["client"].delete(f"/v1/jobs/{job_id}"), obj["output"])


@main.command()
@click.argument("job_id")
@click.pass_obj
def watch(obj, job_id: str) -> None:
    """Poll a job until it settles; exit 0 only if it reaches DONE."""
    client = obj["client"]
    last = None
    while True:
        view = client.get(f"/v1/jobs/{job_id}").json()
        state = view["state"]
        if state != last:
            click.echo(f"{job_id} {state}", err=obj["output"] == "json")
            last = state
        if state in ("DONE", "FAILED", "CANCELLED"):
            if obj["output"] == "json":
                _emit(client.get(f"/v1/jobs/{job_id}"), "json")
            sys.exit(0 if state == "DONE" else 1)
        time.sleep(WATCH_INTERVAL_S)


if __name__ == "__main__":
    main()
