/** Slider positions -> scheduling policy weights summing to exactly 1. */
import type { PolicyWeights } from "./types.js";

export const DEFAULT_WEIGHTS: PolicyWeights = {
  w_esp: 0.5,
  w_wait: 0.3,
  w_exec: 0.2,
};

/**
 * Normalize raw slider values (any non-negative scale) to weights the
 * service accepts: each >= 0 and the sum exactly 1. The last weight is
 * computed as the remainder so float dust cannot push the sum off 1.
 * All-zero input falls back to the service's default policy.
 */
export function normalizeWeights(
  esp: number,
  wait: number,
  exec: number,
): PolicyWeights {
  const e = Math.max(esp, 0);
  const w = Math.max(wait, 0);
  const x = Math.max(exec, 0);
  const total = e + w + x;
  if (total <= 0 || !Number.isFinite(total)) {
    return { ...DEFAULT_WEIGHTS };
  }
  const w_esp = e / total;
  const w_wait = w / total;
  // remainder can round to -1 ulp when exec is 0; clamp keeps the service's
  // non-negativity check happy while the sum stays within its tolerance
  return { w_esp, w_wait, w_exec: Math.max(0, 1 - w_esp - w_wait) };
}
