"""Beat-level morphological entropy: amplitude binning, baseline-excursion
sets, and their fusion into a single per-beat value.

The amplitude metric (BWE) histograms the [0,1]-normalized beat into equal
bandwidths and weights each Shannon term by the bandwidth midpoint. The
phase metric (WSE) treats the most-populated bandwidth as the baseline,
collects maximal runs of at least `min_wavelet_len` samples strictly above
or below it, and scores each run by its size frequency, mean deviation from
the baseline center (the energy weight), and a phase bias built from the
run's cumulative-|deviation| bisector position. The two fuse into a single
value either as the mean of squares or by exponential modulation.

The per-beat kernel is the unit of data parallelism for the batch and
service layers, so the value-only paths (`morph_values`, `wse_value`) stay
allocation-lean; `morphological_entropy` and `extract_wavelet_sets` build
the full per-set diagnostics on top of the same arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateAmplitude, SequenceTooShort

WSE_VARIANTS = ("signed", "absolute")
FUSIONS = ("mean_square", "exp")

# CLI/report numbering of the four (wse_variant, fusion) combinations.
MEE_VARIANTS = {
    1: ("signed", "mean_square"),
    2: ("absolute", "mean_square"),
    3: ("signed", "exp"),
    4: ("absolute", "exp"),
}

_TWO_PI = 2.0 * math.pi


@dataclass
class MorphConfig:
    """Tunables for the morphological metrics.

    bandwidth_count: number of equal amplitude bins over [0, 1]
    wse_variant: "signed" keeps below-baseline energy weights negative,
        "absolute" folds them positive
    fusion: "mean_square" -> (bwe^2 + wse^2) / 2,
        "exp" -> bwe * exp(wse / (2*pi))
    phase_gain: linear gain of the phase-bias mapping
    min_wavelet_len: shortest run kept as an excursion set
    """

    bandwidth_count: int = 100
    wse_variant: str = "absolute"
    fusion: str = "mean_square"
    phase_gain: float = 10.0
    min_wavelet_len: int = 3

    def __post_init__(self):
        if self.bandwidth_count < 1:
            raise ValueError("bandwidth_count must be >= 1")
        if self.wse_variant not in WSE_VARIANTS:
            raise ValueError(f"wse_variant must be one of {WSE_VARIANTS}")
        if self.fusion not in FUSIONS:
            raise ValueError(f"fusion must be one of {FUSIONS}")
        if self.min_wavelet_len < 1:
            raise ValueError("min_wavelet_len must be >= 1")

    @classmethod
    def for_variant(cls, variant: int, **kwargs) -> "MorphConfig":
        """Config for the numbered combination (1..4)."""
        try:
            wse_variant, fusion = MEE_VARIANTS[variant]
        except KeyError:
            raise ValueError(f"variant must be in 1..4, got {variant}") from None
        return cls(wse_variant=wse_variant, fusion=fusion, **kwargs)


@dataclass
class WaveletSet:
    """One maximal excursion run above or below the baseline bandwidth."""

    start_index: int
    length: int
    side: str  # "above" | "below"
    energy_weight: float  # mean deviation from the baseline center, variant-applied
    area_bisector_index: int
    bias: float


@dataclass
class WaveletExtraction:
    baseline_bin_index: int
    gamma_upper: float
    gamma_lower: float
    sets: list[WaveletSet] = field(default_factory=list)


class MorphValues(NamedTuple):
    """Lean per-beat result for batch paths."""

    bwe: float
    wse: float
    mee: float
    baseline_bin_index: int


@dataclass
class MorphResult:
    bwe: float
    wse: float
    mee: float
    baseline_bin_index: int
    wavelet_sets: list[WaveletSet] = field(default_factory=list)


def normalize(x: Sequence[float]) -> np.ndarray:
    """Min-max map onto [0, 1]; raises DegenerateAmplitude on a flat input."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise SequenceTooShort("need at least 2 samples to normalize")
    mn = x.min()
    mx = x.max()
    if mx == mn:
        raise DegenerateAmplitude("max(x) == min(x); cannot normalize")
    return (x - mn) / (mx - mn)


def _bin_counts(y: np.ndarray, k: int) -> np.ndarray:
    """Occupancy of k equal bins over [0,1]; bins are [lo, hi) except the
    last, which also contains y == 1."""
    idx = np.minimum((y * k).astype(np.int64), k - 1)
    return np.bincount(idx, minlength=k)


def _bwe_from_counts(counts: np.ndarray, n: int, k: int) -> float:
    occ = np.flatnonzero(counts)
    f = counts[occ] * (1.0 / n)
    mids = (occ + 0.5) * (1.0 / k)
    return float(-np.dot(mids, f * np.log(f)))


class _RunArrays(NamedTuple):
    """Per-excursion aggregates; empty arrays when no run qualifies."""

    baseline_bin: int
    gamma_lower: float
    gamma_upper: float
    starts: np.ndarray
    lengths: np.ndarray
    above: np.ndarray  # bool per run
    weights: np.ndarray  # variant-applied energy weights
    bisectors: np.ndarray
    biases: np.ndarray


def _run_arrays(y: np.ndarray, counts: np.ndarray, cfg: MorphConfig) -> _RunArrays:
    k = cfg.bandwidth_count
    baseline_bin = int(counts.argmax())  # ties -> lowest index
    gamma_l = baseline_bin / k
    gamma_u = (baseline_bin + 1) / k
    center = 0.5 * (gamma_l + gamma_u)
    t = y.size

    # Runs of samples strictly outside [gamma_l, gamma_u]; a change of side
    # is also a run boundary, so code each sample as +1/-1/0.
    code = (y > gamma_u).view(np.int8) - (y < gamma_l).view(np.int8)
    boundaries = np.flatnonzero(code[1:] != code[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [t]))
    keep = (code[starts] != 0) & ((ends - starts) >= cfg.min_wavelet_len)
    starts = starts[keep]
    ends = ends[keep]

    empty = np.empty(0)
    if starts.size == 0:
        return _RunArrays(baseline_bin, gamma_l, gamma_u, starts,
                          starts, empty.astype(bool), empty, starts, empty)

    dev = y - center
    sgn_cum = np.empty(t + 1)
    sgn_cum[0] = 0.0
    np.cumsum(dev, out=sgn_cum[1:])
    abs_cum = np.empty(t + 1)
    abs_cum[0] = 0.0
    np.cumsum(np.abs(dev), out=abs_cum[1:])

    lengths = ends - starts
    weights = (sgn_cum[ends] - sgn_cum[starts]) / lengths
    if cfg.wse_variant == "absolute":
        weights = np.abs(weights)
    halves = 0.5 * (abs_cum[ends] - abs_cum[starts])
    bisectors = np.searchsorted(abs_cum, abs_cum[starts] + halves, side="left") - 1
    biases = cfg.phase_gain * weights * (bisectors * (1.0 / t))
    return _RunArrays(baseline_bin, gamma_l, gamma_u, starts, lengths,
                      code[starts] > 0, weights, bisectors, biases)


def _wse_from_runs(runs: _RunArrays) -> float:
    lengths = runs.lengths
    if lengths.size == 0:
        return 0.0
    p = lengths * (1.0 / lengths.sum())
    return float(np.sum(runs.biases - p * np.log(p) * runs.weights))


def _materialize(runs: _RunArrays) -> list[WaveletSet]:
    return [
        WaveletSet(
            start_index=int(s),
            length=int(L),
            side="above" if up else "below",
            energy_weight=float(w),
            area_bisector_index=int(b),
            bias=float(phi),
        )
        for s, L, up, w, b, phi in zip(runs.starts, runs.lengths, runs.above,
                                       runs.weights, runs.bisectors, runs.biases)
    ]


def bandwidth_entropy(x: Sequence[float], cfg: MorphConfig) -> float:
    """Midpoint-weighted Shannon entropy of the amplitude-bin occupancies."""
    y = normalize(x)
    return _bwe_from_counts(_bin_counts(y, cfg.bandwidth_count), y.size,
                            cfg.bandwidth_count)


def wse_value(x: Sequence[float], cfg: MorphConfig) -> float:
    """Excursion-set entropy value alone (no per-set diagnostics)."""
    y = normalize(x)
    return _wse_from_runs(_run_arrays(y, _bin_counts(y, cfg.bandwidth_count), cfg))


def extract_wavelet_sets(y: Sequence[float], cfg: MorphConfig) -> WaveletExtraction:
    """Locate the baseline bandwidth and collect the excursion sets of a
    normalized beat. `y` must already lie in [0, 1]."""
    y = np.asarray(y, dtype=np.float64)
    runs = _run_arrays(y, _bin_counts(y, cfg.bandwidth_count), cfg)
    return WaveletExtraction(
        baseline_bin_index=runs.baseline_bin,
        gamma_upper=runs.gamma_upper,
        gamma_lower=runs.gamma_lower,
        sets=_materialize(runs),
    )


def wavelet_set_entropy(
    x: Sequence[float], cfg: MorphConfig
) -> tuple[float, list[WaveletSet], int]:
    """Excursion-set entropy of a beat.

    Returns (value, sets, baseline_bin_index). With no qualifying excursion
    the value is 0; a single set contributes only its phase bias.
    """
    y = normalize(x)
    runs = _run_arrays(y, _bin_counts(y, cfg.bandwidth_count), cfg)
    return _wse_from_runs(runs), _materialize(runs), runs.baseline_bin


def fuse_mee(bwe: float, wse: float, fusion: str) -> float:
    """Combine the amplitude and phase values into one real number."""
    if fusion == "mean_square":
        return (bwe * bwe + wse * wse) / 2.0
    if fusion == "exp":
        return bwe * math.exp(wse / _TWO_PI)
    raise ValueError(f"fusion must be one of {FUSIONS}")


def morph_values(x: Sequence[float], cfg: MorphConfig) -> MorphValues:
    """BWE, WSE, fused value and baseline bin in one lean pass."""
    y = normalize(x)
    counts = _bin_counts(y, cfg.bandwidth_count)
    bwe = _bwe_from_counts(counts, y.size, cfg.bandwidth_count)
    runs = _run_arrays(y, counts, cfg)
    wse = _wse_from_runs(runs)
    return MorphValues(bwe, wse, fuse_mee(bwe, wse, cfg.fusion), runs.baseline_bin)


def morphological_entropy(x: Sequence[float], cfg: MorphConfig) -> MorphResult:
    """BWE, WSE and their fusion for one beat, with per-set diagnostics."""
    y = normalize(x)
    counts = _bin_counts(y, cfg.bandwidth_count)
    bwe = _bwe_from_counts(counts, y.size, cfg.bandwidth_count)
    runs = _run_arrays(y, counts, cfg)
    wse = _wse_from_runs(runs)
    return MorphResult(
        bwe=bwe,
        wse=wse,
        mee=fuse_mee(bwe, wse, cfg.fusion),
        baseline_bin_index=runs.baseline_bin,
        wavelet_sets=_materialize(runs),
    )
