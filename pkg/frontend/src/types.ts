/** Payload types of the ministack HTTP+JSON API (v1). */

export type JobState =
  | "RECEIVED"
  | "SCHEDULED"
  | "COMPILED"
  | "QUEUED"
  | "RUNNING"
  | "DONE"
  | "FAILED"
  | "CANCELLED";

export const TERMINAL_STATES: ReadonlySet<JobState> = new Set([
  "DONE",
  "FAILED",
  "CANCELLED",
]);

export interface FomacSummary {
  avg_fidelity_1q: number;
  avg_fidelity_2q: number;
  avg_readout_fidelity: number;
  healthy: boolean;
  health_reasons: string[];
  qubit_ranking: number[];
  taken_at: number;
}

export interface DeviceSummary {
  device_id: string;
  display_name: string;
  num_qubits: number;
  native_gates: Record<string, number>;
  coupling_map: [number, number][];
  queue_length: number;
  est_wait_s: number;
  fomac: FomacSummary;
}

/** GET /v1/devices/{id} adds the timing constants to the summary fields. */
export interface DeviceDetail extends DeviceSummary {
  gate_durations: Record<string, number>;
  shot_overhead: number;
  setup_overhead: number;
}

export interface GateFidelityEntry {
  gate: string;
  qubits: number[];
  fidelity: number;
}

export interface DeviceTelemetry {
  device_id: string;
  taken_at: number;
  calibrated_at: number;
  temperature_mk: number;
  gate_fidelity: GateFidelityEntry[];
  readout_fidelity: Record<string, number>;
  confusion: Record<string, [number, number]>;
  t1: Record<string, number>;
  t2: Record<string, number>;
}

export interface JobView {
  job_id: string;
  state: JobState;
  device_id: string | null;
  shots: number;
  priority: number;
  seed: number | null;
  origin: string;
  error: string | null;
  est_duration_s: number;
  timestamps: Record<string, number>;
}

export interface CompileStats {
  device_id: string;
  pipeline: string[];
  gate_count_before: number;
  gate_count_after: number;
  depth_before: number;
  depth_after: number;
  swap_count: number;
  esp_before: number | null;
  esp_after: number | null;
  initial_layout: [number, number][];
}

export interface ResultMetadata {
  device_id: string;
  calibrated_at: number;
  compile_stats: CompileStats;
  pipeline: string[];
  policy_weights: PolicyWeights;
  seed: number;
  origin: string;
  mitigation_error?: string;
}

export interface ResultEnvelope {
  job_id: string;
  shots: number;
  counts: Record<string, number>;
  histogram: Record<string, number>;
  mitigated_histogram: Record<string, number> | null;
  metadata: ResultMetadata;
}

export interface PolicyWeights {
  w_esp: number;
  w_wait: number;
  w_exec: number;
}

export interface JobRequest {
  circuit: string;
  shots: number;
  priority?: number;
  policy?: PolicyWeights;
  device?: string | null;
  mitigate?: boolean;
  seed?: number | null;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
