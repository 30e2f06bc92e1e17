"""R-peak detection and fixed-window beat extraction.

Detection is the classical Pan-Tompkins pipeline: 5-15 Hz band-pass
(cascaded low/high-pass Butterworth redesigned for the record's sampling
rate), five-point derivative, squaring, 150 ms moving-window integration,
then dual adaptive thresholds with search-back. Detections are snapped to
the raw-lead extremum (max |amplitude|, so inverted QRS refine correctly)
within +/-50 ms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.signal import butter, filtfilt, find_peaks

from .errors import LeadNotFound, RecordTooShort
from .io import EcgRecord

REFRACTORY_S = 0.200
REFINE_WINDOW_MS = 50.0
LABEL_MATCH_MS = 75.0
BEAT_HALF_WINDOW_S = 0.4


@dataclass
class Beat:
    """One cardiac cycle: +/-0.4 s of samples centered on an R peak."""

    beat_index: int
    r_index: int
    samples: np.ndarray
    pre_rr_s: Optional[float] = None
    post_rr_s: Optional[float] = None
    label: Optional[str] = None


@dataclass
class ExtractedBeats:
    """Beats whose windows fit the record, plus the count of skipped peaks."""

    beats: list[Beat]
    skipped: int

    def __iter__(self) -> Iterator[Beat]:
        return iter(self.beats)

    def __len__(self) -> int:
        return len(self.beats)

    def __getitem__(self, i):
        return self.beats[i]


def beat_window_half(fs: float) -> int:
    """Samples on each side of the R peak; beat length is 2*half + 1."""
    return int(round(BEAT_HALF_WINDOW_S * fs))


def _band_pass(x: np.ndarray, fs: float) -> np.ndarray:
    nyq = fs / 2.0
    high = min(15.0, 0.9 * nyq)
    b, a = butter(2, high / nyq, btype="low")
    y = filtfilt(b, a, x)
    b, a = butter(2, 5.0 / nyq, btype="high")
    return filtfilt(b, a, y)


def detect_r_peaks(record: EcgRecord, lead_name: str) -> list[int]:
    """Locate R peaks on one lead; indices are strictly increasing and at
    least 200 ms apart."""
    try:
        x = record.lead(lead_name)
    except KeyError:
        raise LeadNotFound(
            f"lead {lead_name!r} not in record (have {record.lead_names})"
        ) from None
    fs = record.sampling_rate_hz
    if x.size < 2 * fs:
        raise RecordTooShort(f"need >= 2 s of samples, got {x.size / fs:.2f} s")

    filtered = _band_pass(x, fs)
    deriv = np.convolve(filtered, np.array([1.0, 2.0, 0.0, -2.0, -1.0]) * (fs / 8.0),
                        mode="same")
    squared = deriv * deriv
    win = max(1, int(round(0.150 * fs)))
    integrated = np.convolve(squared, np.ones(win) / win, mode="same")
    if integrated.max() <= 0.0:
        return []

    refractory = int(round(REFRACTORY_S * fs))
    cand, _ = find_peaks(integrated, distance=max(1, refractory))
    if cand.size == 0:
        return []

    # Adaptive thresholding (Pan-Tompkins signal/noise running estimates).
    head = integrated[: int(2 * fs)]
    spki = 0.5 * float(head.max())
    npki = 0.5 * float(head.mean())
    threshold = npki + 0.25 * (spki - npki)

    accepted: list[int] = []
    rr_history: list[int] = []
    last_scan = 0  # candidate list position for search-back
    for pos, idx in enumerate(cand):
        peak = integrated[idx]
        if peak > threshold:
            if accepted and idx - accepted[-1] < refractory:
                continue
            accepted.append(int(idx))
            if len(accepted) >= 2:
                rr_history.append(accepted[-1] - accepted[-2])
                rr_history = rr_history[-8:]
            spki = 0.125 * peak + 0.875 * spki
            last_scan = pos
        else:
            npki = 0.125 * peak + 0.875 * npki
            # Search-back: if more than 1.66 * mean RR has passed without a
            # QRS, take the best skipped candidate above half threshold.
            if accepted and rr_history:
                rr_mean = float(np.mean(rr_history))
                if idx - accepted[-1] > 1.66 * rr_mean:
                    window = [c for c in cand[last_scan + 1 : pos + 1]
                              if c > accepted[-1] + refractory]
                    if window:
                        best = max(window, key=lambda c: integrated[c])
                        if integrated[best] > 0.5 * threshold:
                            accepted.append(int(best))
                            accepted.sort()
                            rr_history.append(accepted[-1] - accepted[-2])
                            rr_history = rr_history[-8:]
                            spki = 0.25 * integrated[best] + 0.75 * spki
                            last_scan = pos
        threshold = npki + 0.25 * (spki - npki)

    if not accepted:
        return []
    refined = refine_r_peaks(record, lead_name, accepted, REFINE_WINDOW_MS)

    # Enforce the refractory period on the refined positions, keeping the
    # larger-amplitude peak of any colliding pair.
    out: list[int] = []
    for idx in refined:
        if out and idx - out[-1] < refractory:
            if abs(x[idx]) > abs(x[out[-1]]):
                out[-1] = idx
        else:
            out.append(idx)
    return out


def refine_r_peaks(
    record: EcgRecord,
    lead_name: str,
    raw_peaks: Sequence[int],
    window_ms: float = REFINE_WINDOW_MS,
) -> list[int]:
    """Snap each peak to the max-|amplitude| sample within +/-window_ms.

    Monotonicity is preserved: when two peaks refine into collision the
    earlier one is kept.
    """
    try:
        x = record.lead(lead_name)
    except KeyError:
        raise LeadNotFound(f"lead {lead_name!r} not in record") from None
    peaks = list(raw_peaks)
    if any(b <= a for a, b in zip(peaks, peaks[1:])):
        raise ValueError("raw_peaks must be strictly increasing")
    half = int(round(window_ms / 1000.0 * record.sampling_rate_hz))
    out: list[int] = []
    for p in peaks:
        lo = max(0, p - half)
        hi = min(x.size, p + half + 1)
        refined = lo + int(np.argmax(np.abs(x[lo:hi])))
        if out and refined <= out[-1]:
            continue
        out.append(refined)
    return out


def extract_beats(
    record: EcgRecord,
    lead_name: str,
    peaks: Sequence[int],
) -> ExtractedBeats:
    """Cut one +/-0.4 s window per peak; windows that spill past either end
    of the record are skipped (and counted). RR context comes from neighbor
    peaks; labels attach from annotations by nearest index within 75 ms.
    """
    try:
        x = record.lead(lead_name)
    except KeyError:
        raise LeadNotFound(f"lead {lead_name!r} not in record") from None
    peaks = list(peaks)
    if any(b <= a for a, b in zip(peaks, peaks[1:])):
        raise ValueError("peaks must be strictly increasing")
    fs = record.sampling_rate_hz
    half = beat_window_half(fs)

    ann_idx: Optional[np.ndarray] = None
    ann_labels: list[str] = []
    if record.annotations:
        ann_idx = np.asarray([i for i, _ in record.annotations])
        ann_labels = [lbl for _, lbl in record.annotations]
    match_tol = LABEL_MATCH_MS / 1000.0 * fs

    beats: list[Beat] = []
    skipped = 0
    for k, p in enumerate(peaks):
        lo, hi = p - half, p + half + 1
        if lo < 0 or hi > x.size:
            skipped += 1
            continue
        pre_rr = (p - peaks[k - 1]) / fs if k > 0 else None
        post_rr = (peaks[k + 1] - p) / fs if k < len(peaks) - 1 else None
        label = None
        if ann_idx is not None and ann_idx.size:
            j = int(np.argmin(np.abs(ann_idx - p)))
            if abs(int(ann_idx[j]) - p) <= match_tol:
                label = ann_labels[j]
        beats.append(
            Beat(
                beat_index=len(beats),
                r_index=p,
                samples=x[lo:hi].copy(),
                pre_rr_s=pre_rr,
                post_rr_s=post_rr,
                label=label,
            )
        )
    return ExtractedBeats(beats=beats, skipped=skipped)


def segment_record(record: EcgRecord, lead_name: str) -> ExtractedBeats:
    """Detect, refine, and extract in one call (the default pipeline)."""
    peaks = detect_r_peaks(record, lead_name)
    return extract_beats(record, lead_name, peaks)
