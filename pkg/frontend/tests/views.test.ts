import { describe, expect, it } from "vitest";

import type { SeriesPayload, ViewState } from "../src/types.js";
import { buildHistogram, buildViews } from "../src/views.js";

function baseState(): ViewState {
  return {
    sessionId: null,
    variant: 2,
    alpha: 0.5,
    visibleRange: [0, 0],
    selectedBeat: null,
    series: null,
    flags: [],
    loading: false,
    error: null,
  };
}

function series(): SeriesPayload {
  return {
    record_id: "r",
    variant: 2,
    beat_indices: [0, 1, 2],
    r_indices: [180, 540, 900],
    labels: ["N", "V", null],
    values: [7.0, 9.6, 7.1],
    bwe: [0.5, 2.1, 0.52],
    wse: [3.6, 2.2, 3.58],
    m_ref: 7.0,
    sigma_m: 1.2,
    fluctuation: [0.0, 0.32, 0.01],
    sampling_rate_hz: 360,
    duration_s: 4,
    waveform: [[-0.2, 1.0], [-0.2, 1.0]],
  };
}

describe("buildViews", () => {
  it("renders the empty state without a session", () => {
    const views = buildViews(baseState());
    expect(views.empty).toBe(true);
    if (views.empty) expect(views.message).toContain("Upload");
  });

  it("renders the empty state for a zero-beat session", () => {
    const state = baseState();
    state.series = { ...series(), beat_indices: [], values: [], fluctuation: [] };
    const views = buildViews(state);
    expect(views.empty).toBe(true);
  });

  it("binds the detail panel to the selected beat's payload values", () => {
    const state = baseState();
    state.series = series();
    state.flags = [false, true, false];
    state.selectedBeat = 1;
    const views = buildViews(state);
    if (views.empty) throw new Error("unexpected empty view");
    expect(views.detail).not.toBeNull();
    expect(views.detail!.bwe).toBe(2.1);
    expect(views.detail!.wse).toBe(2.2);
    expect(views.detail!.mee).toBe(9.6);
    expect(views.detail!.label).toBe("V");
    expect(views.detail!.flagged).toBe(true);
    expect(views.detail!.timeS).toBeCloseTo(540 / 360, 12);
  });

  it("marks flagged beats on the waveform markers", () => {
    const state = baseState();
    state.series = series();
    state.flags = [false, true, false];
    const views = buildViews(state);
    if (views.empty) throw new Error("unexpected empty view");
    expect(views.waveform.beatMarkers.map((m) => m.flagged)).toEqual([
      false,
      true,
      false,
    ]);
    expect(views.flaggedCount).toBe(1);
  });
});

describe("buildHistogram", () => {
  it("the reference bin is the fullest bin", () => {
    const values = [1, 1, 1, 1, 1.01, 3, 3.01];
    const hist = buildHistogram(values, 1.0);
    const maxCount = Math.max(...hist.counts);
    expect(hist.counts[hist.referenceBin]).toBe(maxCount);
    expect(hist.counts.reduce((a, b) => a + b, 0)).toBe(values.length);
  });

  it("handles constant values", () => {
    const hist = buildHistogram([2, 2, 2], 2);
    expect(hist.counts[0]).toBe(3);
  });
});
