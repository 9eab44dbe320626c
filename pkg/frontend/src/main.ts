/** Page bootstrap: connect panel, submission form, event delegation. */
import { ServiceClient } from "./api.js";
import { normalizeWeights } from "./policy.js";
import {
  renderConnection,
  renderDevices,
  renderJobs,
  renderResult,
} from "./render.js";
import { DashboardStore } from "./store.js";
import type { JobRequest } from "./types.js";

const BELL = `OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0], q[1];
measure q[0] -> c[0];
measure q[1] -> c[1];
`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function setupDashboard(doc: Document = document): void {
  const endpointInput = el<HTMLInputElement>("endpoint");
  const tokenInput = el<HTMLInputElement>("token");
  const connectBtn = el<HTMLButtonElement>("connect");
  const connState = el<HTMLElement>("conn-state");
  const devicesBox = el<HTMLElement>("devices");
  const jobsBox = el<HTMLElement>("jobs");
  const resultBox = el<HTMLElement>("result-panel");
  const form = el<HTMLFormElement>("submit-form");
  const circuitInput = el<HTMLTextAreaElement>("circuit");
  const shotsInput = el<HTMLInputElement>("shots");
  const priorityInput = el<HTMLInputElement>("priority");
  const deviceSelect = el<HTMLSelectElement>("device");
  const mitigateInput = el<HTMLInputElement>("mitigate");
  const seedInput = el<HTMLInputElement>("seed");
  const submitError = el<HTMLElement>("submit-error");
  const sliders = {
    esp: el<HTMLInputElement>("w-esp"),
    wait: el<HTMLInputElement>("w-wait"),
    exec: el<HTMLInputElement>("w-exec"),
  };
  const weightsLabel = el<HTMLElement>("weights-label");

  endpointInput.value =
    localStorage.getItem("ministack.endpoint") ?? "http://127.0.0.1:8440";
  tokenInput.value = localStorage.getItem("ministack.token") ?? "";
  if (!circuitInput.value.trim()) circuitInput.value = BELL;

  let store: DashboardStore | null = null;
  let stopPolling: (() => void) | null = null;
  let knownDevices = "";

  const currentWeights = () =>
    normalizeWeights(
      Number(sliders.esp.value),
      Number(sliders.wait.value),
      Number(sliders.exec.value),
    );

  const showWeights = () => {
    const w = currentWeights();
    weightsLabel.textContent = `esp ${w.w_esp.toFixed(2)} · wait ${w.w_wait.toFixed(2)} · exec ${w.w_exec.toFixed(2)}`;
  };
  for (const slider of Object.values(sliders)) {
    slider.addEventListener("input", showWeights);
  }
  showWeights();

  const rerender = () => {
    if (!store) return;
    const state = store.getState();
    renderConnection(connState, state.connection, state.lastError);
    renderDevices(devicesBox, state.devices);
    renderJobs(jobsBox, state.jobs);
    const job = state.jobs.find((j) => j.job_id === state.selectedJob);
    renderResult(
      resultBox,
      job,
      state.selectedJob ? state.results[state.selectedJob] : undefined,
    );
    const ids = state.devices.map((d) => d.device_id).join(",");
    if (ids !== knownDevices) {
      knownDevices = ids;
      const chosen = deviceSelect.value;
      deviceSelect.innerHTML =
        `<option value="">auto</option>` +
        state.devices
          .map((d) => `<option value="${d.device_id}">${d.device_id}</option>`)
          .join("");
      deviceSelect.value = chosen;
    }
  };

  connectBtn.addEventListener("click", async () => {
    stopPolling?.();
    const endpoint = endpointInput.value.replace(/\/+$/, "");
    const token = tokenInput.value;
    localStorage.setItem("ministack.endpoint", endpoint);
    localStorage.setItem("ministack.token", token);
    const client = new ServiceClient(endpoint);
    try {
      await client.openSession(token);
    } catch (err) {
      renderConnection(connState, "error", String(err));
      return;
    }
    store = new DashboardStore(client);
    store.subscribe(rerender);
    stopPolling = store.startPolling(1000);
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!store) {
      submitError.textContent = "connect first";
      return;
    }
    const request: JobRequest = {
      circuit: circuitInput.value,
      shots: Number(shotsInput.value),
      priority: Number(priorityInput.value),
      policy: currentWeights(),
      mitigate: mitigateInput.checked,
    };
    if (deviceSelect.value) request.device = deviceSelect.value;
    if (seedInput.value.trim()) request.seed = Number(seedInput.value);
    submitError.textContent = "";
    store.submit(request).catch((err) => {
      submitError.textContent = String(err);
    });
  });

  jobsBox.addEventListener("click", (event) => {
    if (!store) return;
    const target = event.target as HTMLElement;
    const cancel = target.closest<HTMLElement>(".cancel-btn");
    if (cancel?.dataset.jobId) {
      event.stopPropagation();
      void store.cancel(cancel.dataset.jobId);
      return;
    }
    const row = target.closest<HTMLElement>(".job-row");
    if (row?.dataset.jobId) store.select(row.dataset.jobId);
  });

  // expose for console poking; handy when debugging against a live service
  (doc.defaultView as unknown as { ministack?: object }).ministack = {
    get store() {
      return store;
    },
  };
}

function autoStart(): void {
  // only on the real page; test harnesses import this module with an
  // empty document and call setupDashboard() themselves
  if (document.getElementById("endpoint")) setupDashboard();
}

if (typeof document !== "undefined") {
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", autoStart);
  } else {
    autoStart();
  }
}
