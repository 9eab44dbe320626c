/**
 * Contract tests for ServiceClient against responses recorded from a live
 * service (scripts/record_api_fixtures.py in the repo root regenerates them).
 */
import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { ApiError, ServiceClient } from "../src/api.js";
import type { FetchLike } from "../src/api.js";

interface Fixture {
  status: number;
  body: unknown;
}

function fixture(name: string): Fixture {
  const raw = readFileSync(
    new URL(`./fixtures/${name}.json`, import.meta.url),
    "utf-8",
  );
  return JSON.parse(raw) as Fixture;
}

interface RecordedCall {
  method: string;
  url: string;
  headers: Record<string, string>;
  body: unknown;
}

/** Fetch stub that replays queued fixtures and records every request. */
function stubFetch(queue: Fixture[]): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const fix = queue.shift();
    if (fix === undefined) throw new Error(`unexpected request: ${url}`);
    calls.push({
      method: init?.method ?? "GET",
      url,
      headers: (init?.headers as Record<string, string>) ?? {},
      body:
        typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    return new Response(JSON.stringify(fix.body), {
      status: fix.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

async function openedClient(
  queue: Fixture[],
): Promise<{ client: ServiceClient; calls: RecordedCall[] }> {
  const { fetchFn, calls } = stubFetch([fixture("session"), ...queue]);
  const client = new ServiceClient("http://svc", fetchFn);
  await client.openSession("acceptance-token");
  return { client, calls };
}

describe("ServiceClient", () => {
  it("opens a session without auth, then sends the bearer on every call", async () => {
    const { client, calls } = await openedClient([fixture("devices")]);
    await client.listDevices();

    expect(calls[0]!.method).toBe("POST");
    expect(calls[0]!.url).toBe("http://svc/v1/sessions");
    expect(calls[0]!.body).toEqual({ token: "acceptance-token" });
    expect(calls[0]!.headers["Authorization"]).toBeUndefined();

    const sessionId = (fixture("session").body as { session_id: string })
      .session_id;
    expect(client.session).toBe(sessionId);
    expect(calls[1]!.headers["Authorization"]).toBe(`Bearer ${sessionId}`);
  });

  it("refuses authed calls before a session exists, without touching the network", async () => {
    const { fetchFn, calls } = stubFetch([]);
    const client = new ServiceClient("http://svc", fetchFn);
    await expect(client.listDevices()).rejects.toMatchObject({
      status: 401,
      code: "NoSession",
    });
    expect(calls).toHaveLength(0);
  });

  it("parses the device list", async () => {
    const { client } = await openedClient([fixture("devices")]);
    const devices = await client.listDevices();
    expect(devices.length).toBeGreaterThanOrEqual(2);
    const ids = devices.map((d) => d.device_id);
    expect(ids).toContain("sc20");
    expect(ids).toContain("ion5");
    for (const d of devices) {
      expect(typeof d.fomac.healthy).toBe("boolean");
      expect(d.fomac.avg_fidelity_2q).toBeGreaterThan(0);
      expect(d.fomac.avg_fidelity_2q).toBeLessThanOrEqual(1);
      expect(d.num_qubits).toBeGreaterThan(0);
    }
  });

  it("parses device detail and telemetry", async () => {
    const { client, calls } = await openedClient([
      fixture("device_sc20"),
      fixture("telemetry_sc20"),
    ]);
    const detail = await client.deviceDetail("sc20");
    expect(detail.device_id).toBe("sc20");
    expect(Object.keys(detail.gate_durations).length).toBeGreaterThan(0);

    const telemetry = await client.deviceTelemetry("sc20");
    expect(telemetry.device_id).toBe("sc20");
    expect(telemetry.gate_fidelity.length).toBeGreaterThan(0);
    for (const entry of telemetry.gate_fidelity) {
      expect(entry.fidelity).toBeGreaterThan(0);
      expect(entry.fidelity).toBeLessThanOrEqual(1);
    }
    expect(calls[1]!.url).toBe("http://svc/v1/devices/sc20");
    expect(calls[2]!.url).toBe("http://svc/v1/devices/sc20/telemetry");
  });

  it("escapes path segments built from caller input", async () => {
    const { client, calls } = await openedClient([fixture("job_done")]);
    await client.jobView("weird/../id?x=1");
    expect(calls[1]!.url).toBe(
      `http://svc/v1/jobs/${encodeURIComponent("weird/../id?x=1")}`,
    );
  });

  it("submits a job and reads back the lifecycle view", async () => {
    const { client, calls } = await openedClient([
      fixture("job_submitted"),
      fixture("job_done"),
    ]);
    const req = {
      circuit: "OPENQASM 2.0;",
      shots: 2000,
      mitigate: true,
      seed: 11,
    };
    const { job_id } = await client.submitJob(req);
    expect(job_id.length).toBeGreaterThan(0);
    expect(calls[1]!.method).toBe("POST");
    expect(calls[1]!.body).toEqual(req);

    const view = await client.jobView(job_id);
    expect(view.state).toBe("DONE");
    expect(Object.keys(view.timestamps)).toContain("DONE");
    expect(view.error).toBeNull();
  });

  it("parses a result envelope with both histograms normalized", async () => {
    const { client } = await openedClient([fixture("result")]);
    const result = await client.jobResult("1786613817498-000000");

    const rawMass = Object.values(result.histogram).reduce((a, p) => a + p, 0);
    expect(rawMass).toBeCloseTo(1, 9);
    expect(result.mitigated_histogram).not.toBeNull();
    const mitMass = Object.values(result.mitigated_histogram!).reduce(
      (a, p) => a + p,
      0,
    );
    expect(mitMass).toBeCloseTo(1, 9);

    const shots = Object.values(result.counts).reduce((a, c) => a + c, 0);
    expect(shots).toBe(2000);
    expect(result.metadata.compile_stats.esp_after).toBeGreaterThan(0);
    expect(result.metadata.calibrated_at).toBeGreaterThan(0);
  });

  it("maps error bodies onto ApiError", async () => {
    for (const [name, code] of [
      ["error_bad_token", "AuthError"],
      ["error_unauthorized", "AuthError"],
    ] as const) {
      const fix = fixture(name);
      const { fetchFn } = stubFetch([fix]);
      const client = new ServiceClient("http://svc", fetchFn);
      const err = await client.openSession("nope").catch((e) => e as ApiError);
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(fix.status);
      expect((err as ApiError).code).toBe(code);
    }

    const { client } = await openedClient([
      fixture("error_unknown_job"),
      fixture("error_bad_circuit"),
    ]);
    await expect(client.jobView("0000000000000-000000")).rejects.toMatchObject({
      status: 404,
      code: "UnknownJob",
    });
    await expect(
      client.submitJob({ circuit: "OPENQASM 2.0; qreg q[", shots: 10 }),
    ).rejects.toMatchObject({ status: 400, code: "CircuitSyntaxError" });
  });

  it("falls back to the status line when an error body is not JSON", async () => {
    const fetchFn: FetchLike = async () =>
      new Response("bad gateway", { status: 502, statusText: "Bad Gateway" });
    const client = new ServiceClient("http://svc", fetchFn);
    const err = await client.openSession("tok").catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(502);
    expect((err as ApiError).code).toBe("HTTP502");
  });
});
