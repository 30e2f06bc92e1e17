"""Figure rendering for the CLI report paths.

Every report-producing subcommand can render its figures to files next to
the delimited output (pass --plot-dir). Figures use the Agg backend so the
CLI works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .quality import QualityReport
from .screening import GridSearchResult, MeeSeries

_RC = {
    "figure.figsize": (8.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _new_axes():
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
    return fig, ax


def save_figure(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def screening_curve_figure(result: GridSearchResult):
    """ACC/SPE/F1 across the threshold grid, best threshold marked."""
    fig, ax = _new_axes()
    alphas = result.alphas
    ax.plot(alphas, [r.acc for r in result.curve], label="ACC")
    ax.plot(alphas, [r.spe for r in result.curve], label="SPE")
    ax.plot(alphas, [r.f1 for r in result.curve], label="F1")
    ax.axvline(result.best_alpha, color="k", ls="--", lw=1,
               label=f"best α = {result.best_alpha:.2f}")
    ax.set_xlabel("fluctuation-ratio threshold α")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.legend(loc="lower right")
    return fig


def series_trace_figure(series: MeeSeries, flagged: Optional[Sequence[bool]] = None):
    """Per-beat metric trace with the picked reference and flagged beats."""
    fig, ax = _new_axes()
    x = np.asarray(series.beat_indices)
    ax.plot(x, series.values, lw=0.8, color="tab:blue", label="per-beat value")
    ax.axhline(series.m_ref, color="tab:green", lw=1, ls="--", label="reference")
    if flagged is not None:
        mask = np.asarray(flagged, dtype=bool)
        ax.plot(x[mask], series.values[mask], "o", ms=4, color="tab:red",
                label="flagged")
    ax.set_xlabel("beat index")
    ax.set_ylabel("metric value")
    ax.legend(loc="upper right")
    return fig


def series_histogram_figure(series: MeeSeries, picking_bins: int):
    """Distribution of per-beat values; the reference bin stands out."""
    fig, ax = _new_axes()
    values = series.values
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        hi = lo + 1.0
    counts, edges, patches = ax.hist(values, bins=picking_bins, range=(lo, hi),
                                     color="tab:blue", alpha=0.7)
    ref_bin = int(np.argmax(counts))
    patches[ref_bin].set_facecolor("tab:green")
    ax.axvline(series.m_ref, color="tab:green", lw=1.2, ls="--",
               label=f"reference = {series.m_ref:.3f}")
    ax.set_xlabel("metric value")
    ax.set_ylabel("beats")
    ax.legend()
    return fig


def robustness_figure(stds: Sequence[float], drift: dict[str, list[float]]):
    """Normalized drift of each metric across noise levels."""
    fig, ax = _new_axes()
    for name, row in drift.items():
        ax.plot(stds, row, marker="o", label=name)
    ax.set_xlabel("noise std dev")
    ax.set_ylabel("normalized mean |drift|")
    ax.legend(ncol=2)
    return fig


def quality_track_figure(report: QualityReport):
    """Per-beat metric with noisy beats highlighted."""
    fig, ax = _new_axes()
    idx = [b.beat_index for b in report.per_beat]
    vals = [b.mee for b in report.per_beat]
    noisy = np.array([b.noisy for b in report.per_beat], dtype=bool)
    ax.plot(idx, vals, lw=0.8, color="tab:blue")
    ax.plot(np.asarray(idx)[noisy], np.asarray(vals)[noisy], "x", ms=6,
            color="tab:red", label=f"noisy ({report.noisy_fraction:.0%})")
    ax.set_xlabel("beat index")
    ax.set_ylabel("metric value")
    ax.legend()
    return fig


def bench_figure(names: Sequence[str], mean_us: Sequence[float]):
    """Per-beat processing time by metric, log scale."""
    fig, ax = _new_axes()
    ax.bar(range(len(names)), mean_us, color="tab:blue")
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("mean time per beat (µs)")
    return fig
