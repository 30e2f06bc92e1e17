import { recomputeFlags } from "./flags.js";
import type { SeriesPayload, Variant, ViewState } from "./types.js";

export interface ApiLike {
  uploadRecord(file: Blob, fs: number, lead?: string, ann?: Blob): Promise<{
    session_id: string;
    beat_count: number;
    duration_s: number;
  }>;
  getSeries(sessionId: string, variant: Variant): Promise<SeriesPayload>;
}

type Listener = (state: ViewState) => void;

/**
 * Single-store state container for the review screen.
 *
 * Threshold changes are answered from the cached series (no request);
 * variant changes fetch a fresh series, with a request sequence token so a
 * late response for a superseded request is discarded.
 */
export class Store {
  private state: ViewState = {
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
  private listeners: Listener[] = [];
  private requestSeq = 0;

  constructor(private api: ApiLike) {}

  getState(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  async loadRecord(file: Blob, fs: number, lead?: string, ann?: Blob): Promise<void> {
    this.update({ loading: true, error: null });
    try {
      const result = await this.api.uploadRecord(file, fs, lead, ann);
      this.update({
        sessionId: result.session_id,
        visibleRange: [0, result.duration_s],
        selectedBeat: null,
      });
      await this.refreshSeries();
    } catch (err) {
      this.update({ loading: false, error: String(err) });
    }
  }

  /** Fetch the series for the current variant (request-token guarded). */
  async refreshSeries(): Promise<void> {
    const { sessionId, variant } = this.state;
    if (!sessionId) return;
    const token = ++this.requestSeq;
    this.update({ loading: true, error: null });
    try {
      const series = await this.api.getSeries(sessionId, variant);
      if (token !== this.requestSeq) return; // superseded; drop stale payload
      this.update({
        series,
        flags: recomputeFlags(series.fluctuation, this.state.alpha),
        loading: false,
      });
    } catch (err) {
      if (token !== this.requestSeq) return;
      this.update({ loading: false, error: String(err) });
    }
  }

  /** Instant, local-only threshold update: never touches the network. */
  setAlpha(alpha: number): void {
    const flags = this.state.series
      ? recomputeFlags(this.state.series.fluctuation, alpha)
      : [];
    this.update({ alpha, flags });
  }

  async setVariant(variant: Variant): Promise<void> {
    if (variant === this.state.variant) return;
    this.update({ variant });
    await this.refreshSeries();
  }

  selectBeat(beatIndex: number | null): void {
    this.update({ selectedBeat: beatIndex });
  }

  setVisibleRange(startS: number, endS: number): void {
    const duration = this.state.series?.duration_s ?? endS;
    const start = Math.max(0, Math.min(startS, duration));
    const end = Math.max(start, Math.min(endS, duration));
    this.update({ visibleRange: [start, end] });
  }
}
