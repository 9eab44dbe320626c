/** View-model store: the only mutable state in the page.
 *
 * All server interaction funnels through here. refresh() is coalesced so
 * overlapping poll ticks never stack requests; render code subscribes and
 * stays free of fetch calls.
 */
import { ApiError, ServiceClient } from "./api.js";
import type {
  DeviceSummary,
  JobRequest,
  JobView,
  ResultEnvelope,
} from "./types.js";
import { TERMINAL_STATES } from "./types.js";

export type Connection = "idle" | "ok" | "error";

export interface DashboardState {
  devices: DeviceSummary[];
  jobs: JobView[];
  results: Record<string, ResultEnvelope>;
  selectedJob: string | null;
  connection: Connection;
  lastError: string | null;
}

type Listener = (state: DashboardState) => void;

export class DashboardStore {
  private state: DashboardState = {
    devices: [],
    jobs: [],
    results: {},
    selectedJob: null,
    connection: "idle",
    lastError: null,
  };
  private listeners = new Set<Listener>();
  private inFlight = false;

  constructor(private readonly client: ServiceClient) {}

  getState(): DashboardState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private set(patch: Partial<DashboardState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** One poll tick: devices + jobs, plus the selected job's result once
   * it is DONE. Calls overlapping an in-flight refresh are dropped. */
  async refresh(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const [devices, jobs] = await Promise.all([
        this.client.listDevices(),
        this.client.listJobs(),
      ]);
      jobs.sort((a, b) => (a.job_id < b.job_id ? 1 : -1)); // newest first
      const patch: Partial<DashboardState> = {
        devices,
        jobs,
        connection: "ok",
        lastError: null,
      };
      const selected = this.state.selectedJob;
      if (selected && !(selected in this.state.results)) {
        const view = jobs.find((j) => j.job_id === selected);
        if (view?.state === "DONE") {
          const envelope = await this.client.jobResult(selected);
          patch.results = { ...this.state.results, [selected]: envelope };
        }
      }
      this.set(patch);
    } catch (err) {
      this.set({ connection: "error", lastError: describe(err) });
    } finally {
      this.inFlight = false;
    }
  }

  /** Poll every intervalMs until the returned stop function runs. */
  startPolling(intervalMs = 1000): () => void {
    void this.refresh();
    const timer = setInterval(() => void this.refresh(), intervalMs);
    return () => clearInterval(timer);
  }

  async submit(request: JobRequest): Promise<string> {
    const { job_id } = await this.client.submitJob(request);
    this.set({ selectedJob: job_id });
    await this.refresh();
    return job_id;
  }

  async cancel(jobId: string): Promise<void> {
    const job = this.state.jobs.find((j) => j.job_id === jobId);
    if (job && TERMINAL_STATES.has(job.state)) return;
    try {
      await this.client.cancelJob(jobId);
    } catch (err) {
      // losing the cancel race to DONE is not an error worth a banner
      if (!(err instanceof ApiError && err.status === 409)) throw err;
    }
    await this.refresh();
  }

  select(jobId: string | null): void {
    this.set({ selectedJob: jobId });
    if (jobId !== null && !(jobId in this.state.results)) {
      void this.refresh();
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}
