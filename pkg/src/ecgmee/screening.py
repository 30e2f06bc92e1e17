"""Reference picking, fluctuation ratios, flagging, and screening metrics.

The per-record reference value comes from histogramming the beat metric
sequence into `picking_bins` equal bins and taking the median of the values
in the fullest bin. Each beat's fluctuation ratio is its absolute deviation
from that reference, normalized by (reference + population std); beats with
a ratio strictly above the caller's threshold are flagged abnormal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyBeatList, LengthMismatch, NonpositiveRR, NotApplicable
from .morphology import MorphConfig, morph_values
from .segmentation import Beat

DEFAULT_PICKING_BINS = 40
DEFAULT_GRID = (0.0, 5.0, 0.01)


@dataclass
class MeeSeries:
    """Per-beat metric sequence for one record plus the picked reference."""

    record_id: str
    beat_indices: list[int]
    values: np.ndarray
    m_ref: float
    sigma_m: float
    fluctuation: np.ndarray


@dataclass
class ScreeningReport:
    flagged: list[bool]
    tp: int
    fp: int
    tn: int
    fn: int
    acc: float
    sen: float
    spe: float
    ppv: float
    f1: float

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "acc": self.acc, "sen": self.sen, "spe": self.spe,
            "ppv": self.ppv, "f1": self.f1,
        }


@dataclass
class GridSearchResult:
    best_alpha: float
    best_report: ScreeningReport
    alphas: np.ndarray
    curve: list[ScreeningReport] = field(default_factory=list)


def pick_reference(values: np.ndarray, picking_bins: int) -> tuple[float, float]:
    """(reference, population std) for a metric sequence.

    The histogram spans [min, max] with equal bins (ties on the fullest bin
    go to the lowest index); the reference is the median of that bin's
    member values. A constant sequence degenerates to the common value.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyBeatList("cannot pick a reference from an empty sequence")
    if picking_bins < 1:
        raise ValueError("picking_bins must be >= 1")
    sigma = float(values.std())
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return lo, sigma
    scaled = (values - lo) / (hi - lo)
    idx = np.minimum((scaled * picking_bins).astype(np.int64), picking_bins - 1)
    counts = np.bincount(idx, minlength=picking_bins)
    best_bin = int(counts.argmax())
    members = values[idx == best_bin]
    return float(np.median(members)), sigma


def mee_series(
    beats: Sequence[Beat],
    cfg: MorphConfig,
    picking_bins: int = DEFAULT_PICKING_BINS,
    record_id: str = "",
    values: Optional[np.ndarray] = None,
) -> MeeSeries:
    """Per-beat metric values plus reference and fluctuation ratios.

    Precomputed `values` may be passed (one per beat) to skip the per-beat
    metric evaluation, e.g. when several thresholds are scanned.
    """
    beats = list(beats)
    if not beats:
        raise EmptyBeatList("mee_series needs at least one beat")
    if values is None:
        values = np.array([morph_values(b.samples, cfg).mee for b in beats])
    else:
        values = np.asarray(values, dtype=np.float64)
        if values.size != len(beats):
            raise LengthMismatch("values and beats differ in length")
    m_ref, sigma = pick_reference(values, picking_bins)
    denom = m_ref + sigma
    dev = np.abs(values - m_ref)
    if denom == 0.0:
        fluct = np.where(dev == 0.0, 0.0, np.inf)
    else:
        fluct = dev / denom
    return MeeSeries(
        record_id=record_id,
        beat_indices=[b.beat_index for b in beats],
        values=values,
        m_ref=m_ref,
        sigma_m=sigma,
        fluctuation=fluct,
    )


def flag_beats(series: MeeSeries, alpha: float) -> list[bool]:
    """Strictly-greater comparison of each fluctuation ratio against alpha."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return [bool(f > alpha) for f in series.fluctuation]


def _metrics(tp: int, fp: int, tn: int, fn: int) -> tuple[float, float, float, float, float]:
    total = tp + fp + tn + fn
    acc = (tp + tn) / total if total else 0.0
    sen = tp / (tp + fn) if tp + fn else 0.0
    spe = tn / (tn + fp) if tn + fp else 1.0
    ppv = tp / (tp + fp) if tp + fp else 0.0
    f1 = 2 * ppv * sen / (ppv + sen) if ppv + sen else 0.0
    return acc, sen, spe, ppv, f1


def evaluate(flagged: Sequence[bool], labels: Sequence[str]) -> ScreeningReport:
    """Confusion counts and ACC/SEN/SPE/PPV/F1 for one flag vector.

    The positive class is any label other than N. Callers are responsible
    for dropping beats that should not be scored (unlabeled beats, and S
    beats unless rhythm screening is wanted).
    """
    flagged = list(flagged)
    labels = list(labels)
    if len(flagged) != len(labels):
        raise LengthMismatch(
            f"flagged has {len(flagged)} entries, labels has {len(labels)}"
        )
    tp = fp = tn = fn = 0
    for flag, label in zip(flagged, labels):
        positive = label != "N"
        if flag and positive:
            tp += 1
        elif flag and not positive:
            fp += 1
        elif not flag and positive:
            fn += 1
        else:
            tn += 1
    acc, sen, spe, ppv, f1 = _metrics(tp, fp, tn, fn)
    return ScreeningReport(flagged=flagged, tp=tp, fp=fp, tn=tn, fn=fn,
                           acc=acc, sen=sen, spe=spe, ppv=ppv, f1=f1)


def evaluation_mask(labels: Sequence[Optional[str]], include_sveb: bool = False) -> np.ndarray:
    """Which beats take part in scoring: labeled, and (by default) not S."""
    return np.array(
        [lbl is not None and (include_sveb or lbl != "S") for lbl in labels],
        dtype=bool,
    )


def grid_search_alpha(
    series: MeeSeries,
    labels: Sequence[Optional[str]],
    alpha_min: float = DEFAULT_GRID[0],
    alpha_max: float = DEFAULT_GRID[1],
    step: float = DEFAULT_GRID[2],
    include_sveb: bool = False,
) -> GridSearchResult:
    """Evaluate every alpha on the grid; the best is by F1, ties to the
    smaller alpha. Unlabeled and (by default) S beats are left out of the
    scoring but keep their place in the series."""
    if alpha_min > alpha_max:
        raise ValueError("alpha_min must be <= alpha_max")
    if step <= 0:
        raise ValueError("step must be positive")
    if len(labels) != series.fluctuation.size:
        raise LengthMismatch("labels must align with the series")
    n_steps = math.floor((alpha_max - alpha_min) / step + 1e-9) + 1
    alphas = alpha_min + step * np.arange(n_steps)

    mask = evaluation_mask(labels, include_sveb)
    f = series.fluctuation[mask]
    pos = np.array([labels[i] != "N" for i in np.flatnonzero(mask)], dtype=bool)

    flags = f[None, :] > alphas[:, None]
    tp = (flags & pos).sum(axis=1)
    fp = (flags & ~pos).sum(axis=1)
    fn = (~flags & pos).sum(axis=1)
    tn = (~flags & ~pos).sum(axis=1)

    curve = []
    best_i = 0
    best_f1 = -1.0
    for i in range(n_steps):
        acc, sen, spe, ppv, f1 = _metrics(int(tp[i]), int(fp[i]), int(tn[i]), int(fn[i]))
        curve.append(ScreeningReport(
            flagged=[], tp=int(tp[i]), fp=int(fp[i]), tn=int(tn[i]), fn=int(fn[i]),
            acc=acc, sen=sen, spe=spe, ppv=ppv, f1=f1,
        ))
        if f1 > best_f1:
            best_f1 = f1
            best_i = i
    best_alpha = float(alphas[best_i])
    all_flags = flag_beats(series, best_alpha)
    best_report = evaluate(
        [all_flags[i] for i in np.flatnonzero(mask)],
        [labels[i] for i in np.flatnonzero(mask)],
    )
    return GridSearchResult(best_alpha=best_alpha, best_report=best_report,
                            alphas=alphas, curve=curve)


def pooled_report(reports: Sequence[ScreeningReport]) -> ScreeningReport:
    """Sum confusion counts across records, then recompute the metrics."""
    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    tn = sum(r.tn for r in reports)
    fn = sum(r.fn for r in reports)
    acc, sen, spe, ppv, f1 = _metrics(tp, fp, tn, fn)
    return ScreeningReport(flagged=[], tp=tp, fp=fp, tn=tn, fn=fn,
                           acc=acc, sen=sen, spe=spe, ppv=ppv, f1=f1)


def sveb_adaptive_threshold(f_k: float, pre_rr_s: float, post_rr_s: float) -> float:
    """Threshold rescaled by the relative RR change around the beat.

    beta = f(k) / (2 |RR_next - RR_prev| / (RR_next + RR_prev)); equal RR
    intervals make the denominator zero and raise NotApplicable.
    """
    if pre_rr_s <= 0 or post_rr_s <= 0:
        raise NonpositiveRR("RR intervals must be positive")
    denom = 2.0 * abs(post_rr_s - pre_rr_s) / (post_rr_s + pre_rr_s)
    if denom == 0.0:
        raise NotApplicable("equal RR intervals leave the threshold undefined")
    return f_k / denom
