/** Payload shapes mirrored from the analysis service. */

export interface SeriesPayload {
  record_id: string;
  variant: number;
  beat_indices: number[];
  r_indices: number[];
  labels: (string | null)[];
  values: number[];
  bwe: number[];
  wse: number[];
  m_ref: number;
  sigma_m: number;
  fluctuation: number[];
  sampling_rate_hz: number;
  duration_s: number;
  waveform: [number, number][];
}

export interface ScreenPayload {
  variant: number;
  alpha: number;
  flagged: boolean[];
  f: number[];
  M_ref: number;
  sigma_M: number;
  report?: Record<string, number>;
}

export interface UploadResult {
  session_id: string;
  beat_count: number;
  duration_s: number;
}

export type Variant = 1 | 2 | 3 | 4;

export interface ViewState {
  sessionId: string | null;
  variant: Variant;
  alpha: number;
  visibleRange: [number, number];
  selectedBeat: number | null;
  series: SeriesPayload | null;
  flags: boolean[];
  loading: boolean;
  error: string | null;
}
