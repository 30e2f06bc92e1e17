"""Label-free localization of poor-quality beats.

Two independent marks: a beat whose baseline bandwidth lands at the very
edge of the amplitude range (noise floods the normalization so the modal
bin is topmost/bottommost), and a beat whose metric value is a robust-z
outlier against the record's own distribution. Either mark flags the beat.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import TooFewBeats
from .morphology import MorphConfig, morph_values
from .segmentation import Beat

DEFAULT_EDGE_BINS = 1
DEFAULT_Z_THRESHOLD = 3.5
MAD_SCALE = 1.4826
_EPS = 1e-9


@dataclass
class BeatQuality:
    beat_index: int
    mee: float
    baseline_bin_index: int
    noisy: bool
    reason: Optional[str]  # "baseline_extreme" | "mee_outlier" | "both" | None


@dataclass
class QualityReport:
    per_beat: list[BeatQuality]
    noisy_fraction: float

    def as_dict(self) -> dict:
        return {
            "per_beat": [
                {
                    "beat_index": b.beat_index,
                    "mee": b.mee,
                    "baseline_bin_index": b.baseline_bin_index,
                    "noisy": b.noisy,
                    "reason": b.reason,
                }
                for b in self.per_beat
            ],
            "noisy_fraction": self.noisy_fraction,
        }


def assess_quality(
    beats: Sequence[Beat],
    cfg: MorphConfig,
    edge_bins: int = DEFAULT_EDGE_BINS,
    z_threshold: float = DEFAULT_Z_THRESHOLD,
) -> QualityReport:
    """Mark beats whose baseline bin sits within edge_bins of either end of
    the bin range, or whose metric is a robust-z outlier (> z_threshold
    MAD-scaled deviations from the median)."""
    beats = list(beats)
    if len(beats) < 2:
        raise TooFewBeats("quality assessment needs at least 2 beats")
    if z_threshold <= 0:
        raise ValueError("z_threshold must be positive")

    results = [morph_values(b.samples, cfg) for b in beats]
    values = np.array([r.mee for r in results])
    median = float(np.median(values))
    mad = float(np.median(np.abs(values - median)))
    z = np.abs(values - median) / (MAD_SCALE * mad + _EPS)

    k = cfg.bandwidth_count
    per_beat: list[BeatQuality] = []
    noisy_count = 0
    for beat, res, zi in zip(beats, results, z):
        extreme = (res.baseline_bin_index < edge_bins
                   or res.baseline_bin_index >= k - edge_bins)
        outlier = bool(zi > z_threshold)
        noisy = extreme or outlier
        if extreme and outlier:
            reason = "both"
        elif extreme:
            reason = "baseline_extreme"
        elif outlier:
            reason = "mee_outlier"
        else:
            reason = None
        noisy_count += noisy
        per_beat.append(BeatQuality(
            beat_index=beat.beat_index,
            mee=float(res.mee),
            baseline_bin_index=res.baseline_bin_index,
            noisy=noisy,
            reason=reason,
        ))
    return QualityReport(per_beat=per_beat, noisy_fraction=noisy_count / len(beats))
