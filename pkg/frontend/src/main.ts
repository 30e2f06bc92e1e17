import { ApiClient } from "./api.js";
import { paintHistogram, paintTrace, paintWaveform, traceHit } from "./render.js";
import { Store } from "./state.js";
import type { Variant } from "./types.js";
import { buildViews } from "./views.js";

const api = new ApiClient("");
const store = new Store(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const fileInput = el<HTMLInputElement>("file");
const annInput = el<HTMLInputElement>("ann");
const fsInput = el<HTMLInputElement>("fs");
const leadInput = el<HTMLInputElement>("lead");
const uploadBtn = el<HTMLButtonElement>("upload");
const variantSelect = el<HTMLSelectElement>("variant");
const alphaSlider = el<HTMLInputElement>("alpha");
const alphaLabel = el<HTMLSpanElement>("alpha-value");
const statusLine = el<HTMLSpanElement>("status");
const emptyState = el<HTMLDivElement>("empty");
const regions = el<HTMLDivElement>("regions");
const waveformCanvas = el<HTMLCanvasElement>("waveform");
const traceCanvas = el<HTMLCanvasElement>("trace");
const histogramCanvas = el<HTMLCanvasElement>("histogram");
const detailPanel = el<HTMLDivElement>("detail");

uploadBtn.addEventListener("click", async () => {
  const file = fileInput.files?.[0];
  if (!file) {
    statusLine.textContent = "choose a CSV file first";
    return;
  }
  const fs = Number(fsInput.value);
  const lead = leadInput.value.trim() || undefined;
  const ann = annInput.files?.[0];
  await store.loadRecord(file, fs, lead, ann);
});

variantSelect.addEventListener("change", () => {
  void store.setVariant(Number(variantSelect.value) as Variant);
});

alphaSlider.addEventListener("input", () => {
  // flags recompute locally from the cached series: no request is fired
  store.setAlpha(Number(alphaSlider.value));
});

traceCanvas.addEventListener("click", (event) => {
  const state = store.getState();
  if (!state.series) return;
  const rect = traceCanvas.getBoundingClientRect();
  const x = ((event.clientX - rect.left) / rect.width) * traceCanvas.width;
  store.selectBeat(traceHit(traceCanvas.width, x, state.series.values.length));
});

waveformCanvas.addEventListener("click", (event) => {
  const state = store.getState();
  if (!state.series) return;
  const rect = waveformCanvas.getBoundingClientRect();
  const frac = (event.clientX - rect.left) / rect.width;
  const [start, end] = state.visibleRange;
  const t = start + frac * (end - start);
  const fs = state.series.sampling_rate_hz;
  let best = 0;
  let bestDist = Infinity;
  state.series.r_indices.forEach((r, i) => {
    const d = Math.abs(r / fs - t);
    if (d < bestDist) {
      bestDist = d;
      best = i;
    }
  });
  store.selectBeat(state.series.beat_indices[best]);
});

store.subscribe((state) => {
  alphaLabel.textContent = state.alpha.toFixed(2);
  const views = buildViews(state);
  if (views.empty) {
    emptyState.textContent = views.message;
    emptyState.hidden = false;
    regions.hidden = true;
    return;
  }
  emptyState.hidden = true;
  regions.hidden = false;
  statusLine.textContent =
    `${state.series!.record_id} — ${views.trace.values.length} beats, ` +
    `${views.flaggedCount} flagged, reference ${state.series!.m_ref.toFixed(3)}`;
  paintWaveform(waveformCanvas, views.waveform, state.visibleRange);
  paintTrace(traceCanvas, views.trace);
  paintHistogram(histogramCanvas, views.histogram);
  if (views.detail) {
    const d = views.detail;
    detailPanel.innerHTML =
      `<strong>beat ${d.beatIndex}</strong> at ${d.timeS.toFixed(2)} s` +
      (d.label ? ` — label ${d.label}` : "") +
      `<br>bwe ${d.bwe.toFixed(4)} · wse ${d.wse.toFixed(4)} · mee ${d.mee.toFixed(4)}` +
      `<br>fluctuation ${d.fluctuation.toFixed(4)} → ` +
      (d.flagged ? '<span class="flagged">flagged</span>' : "within threshold");
  } else {
    detailPanel.textContent = "Click a beat in the trace to inspect it.";
  }
});

void api.health().then((ok) => {
  statusLine.textContent = ok ? "service ready" : "service unreachable";
});
