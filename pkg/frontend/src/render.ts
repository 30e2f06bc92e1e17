import type { HistogramView, TraceView, WaveformView } from "./views.js";

/** Canvas painters for the three chart regions. */

const AXIS = "#888";
const SIGNAL = "#2b6cb0";
const FLAG = "#c53030";
const REF = "#2f855a";
const SELECT = "#d69e2e";

function clear(ctx: CanvasRenderingContext2D): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
}

export function paintWaveform(
  canvas: HTMLCanvasElement,
  view: WaveformView,
  rangeS: [number, number],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  clear(ctx);
  const { width, height } = canvas;
  const [start, end] = rangeS;
  const span = Math.max(end - start, 1e-9);
  const buckets = view.buckets;
  const perBucketS = view.durationS / buckets.length;

  let lo = Infinity;
  let hi = -Infinity;
  for (const [mn, mx] of buckets) {
    if (mn < lo) lo = mn;
    if (mx > hi) hi = mx;
  }
  const vspan = hi > lo ? hi - lo : 1;
  const toY = (v: number) => height - ((v - lo) / vspan) * (height - 20) - 10;

  ctx.strokeStyle = SIGNAL;
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let i = 0; i < buckets.length; i++) {
    const t = i * perBucketS;
    if (t < start || t > end) continue;
    const x = ((t - start) / span) * width;
    ctx.moveTo(x, toY(buckets[i][0]));
    ctx.lineTo(x, toY(buckets[i][1]));
  }
  ctx.stroke();

  for (const marker of view.beatMarkers) {
    if (marker.timeS < start || marker.timeS > end) continue;
    const x = ((marker.timeS - start) / span) * width;
    ctx.strokeStyle = marker.flagged ? FLAG : AXIS;
    ctx.globalAlpha = marker.flagged ? 0.9 : 0.35;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, height);
    ctx.stroke();
    ctx.globalAlpha = 1;
    if (marker.beatIndex === view.selected) {
      ctx.fillStyle = SELECT;
      ctx.fillRect(x - 2, 0, 4, 6);
    }
  }
}

export function paintTrace(canvas: HTMLCanvasElement, view: TraceView): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  clear(ctx);
  const { width, height } = canvas;
  const values = view.values;
  if (!values.length) return;
  const lo = Math.min(...values, view.mRef);
  const hi = Math.max(...values, view.mRef);
  const vspan = hi > lo ? hi - lo : 1;
  const toX = (i: number) => (i / Math.max(values.length - 1, 1)) * (width - 10) + 5;
  const toY = (v: number) => height - ((v - lo) / vspan) * (height - 20) - 10;

  ctx.strokeStyle = REF;
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(0, toY(view.mRef));
  ctx.lineTo(width, toY(view.mRef));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.strokeStyle = SIGNAL;
  ctx.beginPath();
  values.forEach((v, i) => {
    const x = toX(i);
    const y = toY(v);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  values.forEach((v, i) => {
    if (!view.flags[i] && i !== view.selected) return;
    ctx.fillStyle = view.flags[i] ? FLAG : SELECT;
    ctx.beginPath();
    ctx.arc(toX(i), toY(v), i === view.selected ? 5 : 3, 0, 2 * Math.PI);
    ctx.fill();
  });
}

export function paintHistogram(canvas: HTMLCanvasElement, view: HistogramView): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  clear(ctx);
  const { width, height } = canvas;
  const maxCount = Math.max(...view.counts, 1);
  const barW = width / view.counts.length;
  view.counts.forEach((count, i) => {
    const h = (count / maxCount) * (height - 12);
    ctx.fillStyle = i === view.referenceBin ? REF : SIGNAL;
    ctx.globalAlpha = i === view.referenceBin ? 0.95 : 0.6;
    ctx.fillRect(i * barW + 1, height - h, barW - 2, h);
  });
  ctx.globalAlpha = 1;
}

/** Map a click x-position on the trace back to a beat index. */
export function traceHit(width: number, x: number, beatCount: number): number {
  const rel = (x - 5) / Math.max(width - 10, 1);
  return Math.max(0, Math.min(beatCount - 1, Math.round(rel * (beatCount - 1))));
}
