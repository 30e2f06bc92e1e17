import type { ViewState } from "./types.js";

/**
 * Pure view-model builders: everything the four linked regions display is
 * derived here from state, so rendering is a dumb painter and the bindings
 * are unit-testable without a DOM.
 */

export interface WaveformView {
  buckets: [number, number][];
  durationS: number;
  beatMarkers: { beatIndex: number; timeS: number; flagged: boolean }[];
  selected: number | null;
}

export interface TraceView {
  values: number[];
  mRef: number;
  flags: boolean[];
  selected: number | null;
}

export interface HistogramView {
  counts: number[];
  edges: number[];
  referenceBin: number;
  mRef: number;
}

export interface DetailView {
  beatIndex: number;
  timeS: number;
  label: string | null;
  bwe: number;
  wse: number;
  mee: number;
  fluctuation: number;
  flagged: boolean;
}

export type Views =
  | { empty: true; message: string }
  | {
      empty: false;
      waveform: WaveformView;
      trace: TraceView;
      histogram: HistogramView;
      detail: DetailView | null;
      flaggedCount: number;
    };

export const HISTOGRAM_BINS = 40;

export function buildHistogram(values: number[], mRef: number): HistogramView {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi > lo ? hi - lo : 1;
  const counts = new Array(HISTOGRAM_BINS).fill(0);
  for (const v of values) {
    const bin = Math.min(Math.floor(((v - lo) / span) * HISTOGRAM_BINS), HISTOGRAM_BINS - 1);
    counts[bin]++;
  }
  const edges = Array.from({ length: HISTOGRAM_BINS + 1 }, (_, i) => lo + (span * i) / HISTOGRAM_BINS);
  let referenceBin = 0;
  for (let i = 1; i < HISTOGRAM_BINS; i++) {
    if (counts[i] > counts[referenceBin]) referenceBin = i;
  }
  return { counts, edges, referenceBin, mRef };
}

export function buildViews(state: ViewState): Views {
  const series = state.series;
  if (!series || series.values.length === 0) {
    return {
      empty: true,
      message: state.error ?? (state.loading ? "Loading…" : "Upload a record to begin."),
    };
  }
  const fs = series.sampling_rate_hz;
  const waveform: WaveformView = {
    buckets: series.waveform,
    durationS: series.duration_s,
    beatMarkers: series.beat_indices.map((beatIndex, i) => ({
      beatIndex,
      timeS: series.r_indices[i] / fs,
      flagged: state.flags[i] ?? false,
    })),
    selected: state.selectedBeat,
  };
  const trace: TraceView = {
    values: series.values,
    mRef: series.m_ref,
    flags: state.flags,
    selected: state.selectedBeat,
  };
  const histogram = buildHistogram(series.values, series.m_ref);
  let detail: DetailView | null = null;
  if (state.selectedBeat !== null) {
    const i = series.beat_indices.indexOf(state.selectedBeat);
    if (i >= 0) {
      detail = {
        beatIndex: state.selectedBeat,
        timeS: series.r_indices[i] / fs,
        label: series.labels[i],
        bwe: series.bwe[i],
        wse: series.wse[i],
        mee: series.values[i],
        fluctuation: series.fluctuation[i],
        flagged: state.flags[i] ?? false,
      };
    }
  }
  return {
    empty: false,
    waveform,
    trace,
    histogram,
    detail,
    flaggedCount: state.flags.filter(Boolean).length,
  };
}
