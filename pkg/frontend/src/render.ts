/** DOM rendering. Each section rebuilds its container from state; event
 * wiring stays in main.ts via delegation, so these are plain functions of
 * the view model. */
import { formatProbability, histogramBars } from "./histogram.js";
import type {
  DeviceSummary,
  JobView,
  ResultEnvelope,
} from "./types.js";
import { TERMINAL_STATES } from "./types.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function pct(x: number): string {
  return `${(100 * x).toFixed(2)}%`;
}

function clock(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace("T", " ").slice(0, 19);
}

export function renderDevices(
  container: HTMLElement,
  devices: DeviceSummary[],
): void {
  if (devices.length === 0) {
    container.innerHTML = `<div class="empty">No devices.</div>`;
    return;
  }
  container.innerHTML = devices
    .map((d) => {
      const health = d.fomac.healthy
        ? `<span class="badge badge-ok" data-health="healthy">healthy</span>`
        : `<span class="badge badge-bad" data-health="unhealthy">unhealthy: ${esc(
            d.fomac.health_reasons.join(", "),
          )}</span>`;
      const gates = Object.keys(d.native_gates).sort().join(", ");
      return `
<div class="card device-card" data-device-id="${esc(d.device_id)}">
  <div class="card-head">
    <span class="device-name">${esc(d.display_name)}</span>
    ${health}
  </div>
  <div class="device-meta mono">${esc(d.device_id)} · ${d.num_qubits} qubits · ${esc(gates)}</div>
  <div class="device-stats">
    <span>1q ${pct(d.fomac.avg_fidelity_1q)}</span>
    <span>2q ${pct(d.fomac.avg_fidelity_2q)}</span>
    <span>readout ${pct(d.fomac.avg_readout_fidelity)}</span>
  </div>
  <div class="device-queue">queue ${d.queue_length} · est wait ${d.est_wait_s.toFixed(1)}s</div>
</div>`;
    })
    .join("");
}

export function renderJobs(container: HTMLElement, jobs: JobView[]): void {
  if (jobs.length === 0) {
    container.innerHTML = `<div class="empty">No jobs yet.</div>`;
    return;
  }
  const rows = jobs
    .map((j) => {
      const cancel = TERMINAL_STATES.has(j.state)
        ? ""
        : `<button class="cancel-btn" data-job-id="${esc(j.job_id)}">cancel</button>`;
      const error = j.error ? `<div class="job-error">${esc(j.error)}</div>` : "";
      return `
<tr class="job-row" data-job-id="${esc(j.job_id)}">
  <td class="mono">${esc(j.job_id)}</td>
  <td>${esc(j.device_id ?? "—")}</td>
  <td><span class="badge state-${j.state}" data-state="${j.state}">${j.state}</span>${error}</td>
  <td>${j.shots}</td>
  <td>${j.priority}</td>
  <td>${esc(j.origin)}</td>
  <td>${cancel}</td>
</tr>`;
    })
    .join("");
  container.innerHTML = `
<table class="jobs-table">
  <thead><tr><th>job</th><th>device</th><th>state</th><th>shots</th><th>prio</th><th>origin</th><th></th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

function histogramHtml(
  kind: string,
  title: string,
  histogram: Record<string, number>,
): string {
  const bars = histogramBars(histogram)
    .map(
      (b) => `
<div class="histogram-bar" data-key="${esc(b.key)}" data-probability="${b.probability}">
  <span class="bar-key mono">${esc(b.key)}</span>
  <span class="bar-track"><span class="bar-fill" style="width:${(100 * b.fill).toFixed(1)}%"></span></span>
  <span class="bar-value">${formatProbability(b.probability)}</span>
</div>`,
    )
    .join("");
  return `
<div class="histogram" data-kind="${esc(kind)}">
  <div class="histogram-title">${esc(title)}</div>
  ${bars}
</div>`;
}

export function renderResult(
  container: HTMLElement,
  job: JobView | undefined,
  envelope: ResultEnvelope | undefined,
): void {
  if (!job) {
    container.innerHTML = `<div class="empty">Select a job to inspect its result.</div>`;
    return;
  }
  if (!envelope) {
    const note =
      job.state === "DONE"
        ? "Loading result…"
        : job.state === "FAILED" || job.state === "CANCELLED"
          ? `No result: job ${job.state}${job.error ? ` (${esc(job.error)})` : ""}.`
          : `Waiting: job is ${job.state}.`;
    container.innerHTML = `<div class="empty" data-result-state="${job.state}">${note}</div>`;
    return;
  }
  const meta = envelope.metadata;
  const stats = meta.compile_stats;
  const mitigated = envelope.mitigated_histogram
    ? histogramHtml("mitigated", "Mitigated", envelope.mitigated_histogram)
    : meta.mitigation_error
      ? `<div class="histogram" data-kind="mitigated"><div class="histogram-title">Mitigated</div><div class="empty">unavailable: ${esc(meta.mitigation_error)}</div></div>`
      : "";
  container.innerHTML = `
<div class="result-head mono">
  ${esc(envelope.job_id)} · ${esc(meta.device_id)} · ${envelope.shots} shots · seed ${meta.seed}
</div>
<div class="result-compile">
  gates ${stats.gate_count_before} → ${stats.gate_count_after} ·
  depth ${stats.depth_before} → ${stats.depth_after} ·
  swaps ${stats.swap_count}${stats.esp_after !== null ? ` · ESP ${pct(stats.esp_after)}` : ""}
</div>
<div class="calibration-note">calibrated ${clock(meta.calibrated_at)} (UTC)</div>
<div class="histogram-pair">
  ${histogramHtml("raw", "Raw", envelope.histogram)}
  ${mitigated}
</div>`;
}

export function renderConnection(
  el: HTMLElement,
  connection: string,
  lastError: string | null,
): void {
  el.className = `conn conn-${connection}`;
  el.textContent =
    connection === "error" ? `connection error: ${lastError ?? ""}` : connection;
}
