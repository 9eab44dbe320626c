/** Bitstring histogram -> bar model. Pure, so the scaling is testable. */

export interface Bar {
  key: string;
  probability: number;
  /** Relative to the tallest bar, for CSS widths. */
  fill: number;
}

const MAX_BARS = 16;

/**
 * Bars in bitstring order. When there are more than maxBars keys, the
 * lightest ones collapse into a trailing "rest" bar so dense histograms
 * stay readable.
 */
export function histogramBars(
  histogram: Record<string, number>,
  maxBars: number = MAX_BARS,
): Bar[] {
  const entries = Object.entries(histogram).filter(([, p]) => p > 0);
  entries.sort((a, b) => (a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0));
  let shown = entries;
  let rest = 0;
  if (entries.length > maxBars) {
    const byMass = [...entries].sort((a, b) => b[1] - a[1]);
    const keep = new Set(byMass.slice(0, maxBars - 1).map(([k]) => k));
    shown = entries.filter(([k]) => keep.has(k));
    rest = entries
      .filter(([k]) => !keep.has(k))
      .reduce((acc, [, p]) => acc + p, 0);
  }
  const peak = Math.max(...shown.map(([, p]) => p), rest, 1e-12);
  const bars = shown.map(([key, probability]) => ({
    key,
    probability,
    fill: probability / peak,
  }));
  if (rest > 0) {
    bars.push({ key: "rest", probability: rest, fill: rest / peak });
  }
  return bars;
}

export function formatProbability(p: number): string {
  return `${(100 * p).toFixed(1)}%`;
}
