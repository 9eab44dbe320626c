/** Typed client for the ministack service. Fetch is injectable for tests. */
import type {
  ApiErrorBody,
  DeviceDetail,
  DeviceSummary,
  DeviceTelemetry,
  JobRequest,
  JobView,
  ResultEnvelope,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ServiceClient {
  private sessionId: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  get session(): string | null {
    return this.sessionId;
  }

  async openSession(token: string): Promise<string> {
    const body = await this.request<{ session_id: string }>(
      "POST",
      "/v1/sessions",
      { token },
      false,
    );
    this.sessionId = body.session_id;
    return body.session_id;
  }

  listDevices(): Promise<DeviceSummary[]> {
    return this.request("GET", "/v1/devices");
  }

  deviceDetail(deviceId: string): Promise<DeviceDetail> {
    return this.request("GET", `/v1/devices/${encodeURIComponent(deviceId)}`);
  }

  deviceTelemetry(deviceId: string): Promise<DeviceTelemetry> {
    return this.request(
      "GET",
      `/v1/devices/${encodeURIComponent(deviceId)}/telemetry`,
    );
  }

  submitJob(req: JobRequest): Promise<{ job_id: string }> {
    return this.request("POST", "/v1/jobs", req);
  }

  listJobs(): Promise<JobView[]> {
    return this.request("GET", "/v1/jobs");
  }

  jobView(jobId: string): Promise<JobView> {
    return this.request("GET", `/v1/jobs/${encodeURIComponent(jobId)}`);
  }

  jobResult(jobId: string): Promise<ResultEnvelope> {
    return this.request(
      "GET",
      `/v1/jobs/${encodeURIComponent(jobId)}/result`,
    );
  }

  cancelJob(jobId: string): Promise<JobView> {
    return this.request("DELETE", `/v1/jobs/${encodeURIComponent(jobId)}`);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    authed = true,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (authed) {
      if (this.sessionId === null) {
        throw new ApiError(401, "NoSession", "open a session first");
      }
      headers["Authorization"] = `Bearer ${this.sessionId}`;
    }
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: ApiErrorBody = {
        error: `HTTP${resp.status}`,
        detail: resp.statusText,
      };
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; keep the status-line fallback
      }
      throw new ApiError(resp.status, parsed.error, parsed.detail);
    }
    return (await resp.json()) as T;
  }
}
