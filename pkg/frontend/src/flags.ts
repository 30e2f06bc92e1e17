/**
 * Client-side flag recomputation.
 *
 * Mirrors the server rule exactly: a beat is abnormal when its fluctuation
 * ratio is STRICTLY greater than the threshold. Keeping this pure and local
 * lets the threshold slider update highlights with no network round-trip;
 * the server stays the source of truth for reports.
 */
export function recomputeFlags(fluctuation: number[], alpha: number): boolean[] {
  return fluctuation.map((f) => f > alpha);
}

export function flaggedCount(fluctuation: number[], alpha: number): number {
  let n = 0;
  for (const f of fluctuation) if (f > alpha) n++;
  return n;
}
