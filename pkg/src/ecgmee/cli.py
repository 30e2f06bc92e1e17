"""Command-line entry point.

Subcommands: analyze, screen, prune, quality, bench, robustness, serve.
Delimited output goes to stdout (or --out); figures render next to it when
--plot-dir is given. MEE_THREADS mirrors --threads.
"""

from __future__ import annotations

import argparse
import csv
import gc
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import baselines, diversity, plots, quality, screening
from .errors import EcgMeeError, UndefinedEntropy
from .io import EcgRecord, NoiseSpec, add_noise, load_record
from .morphology import MorphConfig, bandwidth_entropy, fuse_mee, morph_values, wse_value
from .screening import MeeSeries
from .segmentation import extract_beats, detect_r_peaks

BEAT_METRICS = ("pe", "ae", "se", "fe", "bwe", "wse1", "wse2",
                "mee1", "mee2", "mee3", "mee4")
FUSION_METRICS = ("fusion_square", "fusion_exp")
DEFAULT_ANALYZE_METRICS = "mee2"
DEFAULT_BENCH_METRICS = "pe,ae,se,fe,bwe,wse2,fusion_square,fusion_exp"
DEFAULT_ROBUSTNESS_METRICS = "pe,ae,se,fe,bwe,wse2,mee2"
DEFAULT_STDS = "0.01,0.02,0.03"
MIN_BENCH_REPS = 100


@dataclass
class BenchResult:
    metric_name: str
    mean_us_per_beat: float
    p95_us_per_beat: float
    beat_count: int
    beat_length: int


def _metric_fn(name: str, base_cfg: baselines.BaselineConfig,
               bandwidths: int) -> Callable[[np.ndarray], float]:
    """Per-beat metric callable; unknown names raise ValueError."""
    if name == "pe":
        return lambda x: baselines.permutation_entropy(x, base_cfg)
    if name == "ae":
        return lambda x: baselines.approximate_entropy(x, base_cfg)
    if name == "se":
        return lambda x: baselines.sample_entropy(x, base_cfg)
    if name == "fe":
        return lambda x: baselines.fuzzy_entropy(x, base_cfg)
    if name == "bwe":
        cfg = MorphConfig(bandwidth_count=bandwidths)
        return lambda x: bandwidth_entropy(x, cfg)
    if name in ("wse1", "wse2"):
        variant = "signed" if name == "wse1" else "absolute"
        cfg = MorphConfig(bandwidth_count=bandwidths, wse_variant=variant)
        return lambda x: wse_value(x, cfg)
    if name in ("mee1", "mee2", "mee3", "mee4"):
        cfg = MorphConfig.for_variant(int(name[-1]), bandwidth_count=bandwidths)
        return lambda x: morph_values(x, cfg).mee
    raise ValueError(
        f"unknown metric {name!r}; valid names: {', '.join(BEAT_METRICS)}"
    )


def _parse_metric_list(spec: str, allowed: Sequence[str]) -> list[str]:
    names = [n.strip() for n in spec.split(",") if n.strip()]
    if not names:
        raise ValueError("empty metric list")
    for n in names:
        if n not in allowed:
            raise ValueError(
                f"unknown metric {n!r}; valid names: {', '.join(allowed)}"
            )
    return names


def _load(args) -> EcgRecord:
    return load_record(args.record, format=args.format_in, sampling_rate_hz=args.fs)


def _resolve_lead(record: EcgRecord, lead: Optional[str]) -> str:
    if lead is None:
        if len(record.lead_names) == 1:
            return record.lead_names[0]
        if "II" in record.lead_names:
            return "II"
        raise EcgMeeError(
            f"record has several leads ({', '.join(record.lead_names)}); pass --lead"
        )
    return lead


def _thread_count(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("MEE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_beats(fn, items, threads: int):
    if threads <= 1 or len(items) < 4:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_csv(rows: list[list], header: list[str], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(v)


# --- analyze ---

def cmd_analyze(args) -> int:
    record = _load(args)
    lead = _resolve_lead(record, args.lead)
    metrics = _parse_metric_list(args.metrics, BEAT_METRICS)
    base_cfg = baselines.BaselineConfig()
    fns = [(m, _metric_fn(m, base_cfg, args.bandwidths)) for m in metrics]

    peaks = detect_r_peaks(record, lead)
    beats = extract_beats(record, lead, peaks)

    def one(beat):
        row = [beat.beat_index, beat.r_index, beat.label or ""]
        for _, fn in fns:
            try:
                row.append(float(fn(beat.samples)))
            except UndefinedEntropy:
                row.append(float("nan"))
        return row

    rows = _map_beats(one, beats.beats, _thread_count(args))
    header = ["beat_index", "r_index", "label"] + metrics
    if args.format == "json":
        payload = [dict(zip(header, r)) for r in rows]
        json.dump(_json_clean(payload), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        _write_csv([[_fmt(v) for v in r] for r in rows], header, sys.stdout)

    if args.plot_dir:
        for m in metrics:
            col = metrics.index(m) + 3
            values = np.array([r[col] for r in rows], dtype=float)
            series = MeeSeries(record.record_id, [r[0] for r in rows], values,
                               m_ref=float(np.median(values)), sigma_m=float(values.std()),
                               fluctuation=np.zeros(len(rows)))
            fig = plots.series_trace_figure(series)
            plots.save_figure(fig, Path(args.plot_dir) / f"analyze_{m}.png")
    return 0


# --- screen ---

def cmd_screen(args) -> int:
    record = _load(args)
    lead = _resolve_lead(record, args.lead)
    cfg = MorphConfig.for_variant(args.variant, bandwidth_count=args.bandwidths)
    peaks = detect_r_peaks(record, lead)
    beats = extract_beats(record, lead, peaks)
    if not beats.beats:
        raise EcgMeeError("no beats extracted")
    series = screening.mee_series(beats.beats, cfg, args.picking_bins,
                                  record_id=record.record_id)
    labels = [b.label for b in beats.beats]
    have_labels = any(lbl is not None for lbl in labels)

    info: dict = {
        "record_id": record.record_id,
        "lead": lead,
        "variant": args.variant,
        "beats": len(beats.beats),
        "skipped_edge_peaks": beats.skipped,
        "m_ref": series.m_ref,
        "sigma_m": series.sigma_m,
    }
    grid_result = None
    if args.grid:
        if not have_labels:
            raise EcgMeeError("--grid needs a labeled record (no annotations found)")
        grid_result = screening.grid_search_alpha(
            series, labels, args.grid_min, args.grid_max, args.grid_step,
            include_sveb=args.include_sveb)
        report = grid_result.best_report
        flags = screening.flag_beats(series, grid_result.best_alpha)
        info["alpha"] = grid_result.best_alpha
        info["grid_points"] = len(grid_result.curve)
        info.update(report.as_dict())
        if args.curve_out:
            with open(args.curve_out, "w", newline="") as fh:
                _write_csv(
                    [[_fmt(a), _fmt(r.acc), _fmt(r.spe), _fmt(r.f1)]
                     for a, r in zip(grid_result.alphas, grid_result.curve)],
                    ["alpha", "acc", "spe", "f1"], fh)
    else:
        if args.alpha is None:
            raise EcgMeeError("pass --alpha or --grid")
        flags = screening.flag_beats(series, args.alpha)
        info["alpha"] = args.alpha
        if have_labels:
            mask = screening.evaluation_mask(labels, args.include_sveb)
            idx = np.flatnonzero(mask)
            report = screening.evaluate([flags[i] for i in idx],
                                        [labels[i] for i in idx])
            info.update(report.as_dict())
    info["flagged"] = int(sum(flags))

    if args.format == "json":
        json.dump(_json_clean(info), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for key, value in info.items():
            sys.stdout.write(f"{key}={_fmt(value)}\n")

    if args.plot_dir:
        out = Path(args.plot_dir)
        plots.save_figure(plots.series_trace_figure(series, flags),
                          out / "screen_trace.png")
        plots.save_figure(plots.series_histogram_figure(series, args.picking_bins),
                          out / "screen_histogram.png")
        if grid_result is not None:
            plots.save_figure(plots.screening_curve_figure(grid_result),
                              out / "screen_curve.png")
    return 0


# --- prune ---

def _read_scores_csv(path: str) -> list[diversity.RecordScore]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(diversity.RecordScore(
                record_id=row["record_id"],
                label=row.get("label", ""),
                record_mee=float(row["record_mee"]),
                beat_count_used=int(row.get("beat_count_used", 1) or 1),
            ))
    return out


def cmd_prune(args) -> int:
    if args.scores:
        scores = _read_scores_csv(args.scores)
    else:
        if not args.records:
            raise EcgMeeError("pass record files or --scores")
        cfg = MorphConfig.for_variant(args.variant, bandwidth_count=args.bandwidths)

        def score(path):
            record = load_record(path, sampling_rate_hz=args.fs)
            lead = args.lead or diversity.pick_lead(record)
            return diversity.record_mee(record, lead, cfg, label=args.label)

        scores = _map_beats(score, args.records, _thread_count(args))
    if args.scores_out:
        with open(args.scores_out, "w", newline="") as fh:
            _write_csv(
                [[s.record_id, s.label, _fmt(s.record_mee), s.beat_count_used]
                 for s in scores],
                ["record_id", "label", "record_mee", "beat_count_used"], fh)

    if args.random is not None:
        manifest = diversity.prune_random([s.record_id for s in scores],
                                          args.random, args.seed)
    else:
        manifest = diversity.prune_by_mee(scores, args.picking_bins,
                                          args.keep_per_bin)
    payload = json.dumps(manifest.as_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")
    return 0


# --- quality ---

def cmd_quality(args) -> int:
    record = _load(args)
    lead = _resolve_lead(record, args.lead)
    cfg = MorphConfig.for_variant(args.variant, bandwidth_count=args.bandwidths)
    peaks = detect_r_peaks(record, lead)
    beats = extract_beats(record, lead, peaks)
    report = quality.assess_quality(beats.beats, cfg, args.edge_bins,
                                    args.z_threshold)
    if args.format == "csv":
        rows = [[b.beat_index, _fmt(b.mee), b.baseline_bin_index,
                 int(b.noisy), b.reason or ""] for b in report.per_beat]
        _write_csv(rows, ["beat_index", "mee", "baseline_bin_index",
                          "noisy", "reason"], sys.stdout)
    else:
        json.dump(_json_clean(report.as_dict()), sys.stdout, indent=2)
        sys.stdout.write("\n")
    if args.plot_dir:
        plots.save_figure(plots.quality_track_figure(report),
                          Path(args.plot_dir) / "quality_track.png")
    return 0


# --- bench ---

def make_bench_beat(rng: np.random.Generator, length: int) -> np.ndarray:
    """Random ECG-shaped beat: P/QRS/T bumps with jittered amplitude and a
    little additive noise."""
    t = np.arange(length)
    c = length // 2
    x = (1.0 * np.exp(-0.5 * ((t - c) / (0.018 * length)) ** 2)
         + 0.15 * np.exp(-0.5 * ((t - c + 0.25 * length) / (0.04 * length)) ** 2)
         + 0.30 * np.exp(-0.5 * ((t - c - 0.28 * length) / (0.055 * length)) ** 2))
    return x * rng.uniform(0.7, 1.3) + rng.normal(0.0, 0.01, length)


def _time_per_call(fn, items) -> np.ndarray:
    out = np.empty(len(items))
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        for i, item in enumerate(items):
            t0 = time.perf_counter_ns()
            fn(item)
            out[i] = time.perf_counter_ns() - t0
    finally:
        if gc_was_on:
            gc.enable()
    return out / 1000.0  # us


def _time_chunked(fn, pairs, chunk: int = 256) -> np.ndarray:
    """Per-call cost of sub-microsecond functions, measured over chunks."""
    samples = []
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        for lo in range(0, len(pairs), chunk):
            batch = pairs[lo:lo + chunk]
            t0 = time.perf_counter_ns()
            for b, w in batch:
                fn(b, w)
            samples.append((time.perf_counter_ns() - t0) / len(batch))
    finally:
        if gc_was_on:
            gc.enable()
    return np.asarray(samples) / 1000.0  # us


def run_bench(beat_length: int, reps: int, metric_names: Sequence[str],
              seed: int = 0, bandwidths: int = 100) -> list[BenchResult]:
    if reps < MIN_BENCH_REPS:
        raise EcgMeeError(f"repetitions must be >= {MIN_BENCH_REPS}, got {reps}")
    rng = np.random.default_rng(seed)
    beats = [make_bench_beat(rng, beat_length) for _ in range(min(reps, 512))]
    items = [beats[i % len(beats)] for i in range(reps)]
    base_cfg = baselines.BaselineConfig()

    results = []
    for name in metric_names:
        if name in FUSION_METRICS:
            fusion = "mean_square" if name == "fusion_square" else "exp"
            pairs = [(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(reps)]
            fuse_mee(1.0, 1.0, fusion)  # warm
            times = _time_chunked(lambda b, w: fuse_mee(b, w, fusion), pairs)
        else:
            fn = _metric_fn(name, base_cfg, bandwidths)
            fn(items[0])  # warm
            times = _time_per_call(fn, items)
        results.append(BenchResult(
            metric_name=name,
            mean_us_per_beat=float(times.mean()),
            p95_us_per_beat=float(np.percentile(times, 95)),
            beat_count=reps,
            beat_length=beat_length,
        ))
    return results


def cmd_bench(args) -> int:
    metrics = _parse_metric_list(args.metrics, BEAT_METRICS + FUSION_METRICS)
    results = run_bench(args.beat_length, args.reps, metrics,
                        seed=args.seed, bandwidths=args.bandwidths)
    fe_mean = next((r.mean_us_per_beat for r in results if r.metric_name == "fe"),
                   None)
    rows = []
    for r in results:
        ratio = fe_mean / r.mean_us_per_beat if fe_mean else None
        rows.append([r.metric_name, _fmt(r.mean_us_per_beat),
                     _fmt(r.p95_us_per_beat), r.beat_count, r.beat_length,
                     _fmt(ratio)])
    _write_csv(rows, ["metric", "mean_us_per_beat", "p95_us_per_beat",
                      "beat_count", "beat_length", "fe_over_metric"], sys.stdout)
    if args.plot_dir:
        plots.save_figure(
            plots.bench_figure([r.metric_name for r in results],
                               [r.mean_us_per_beat for r in results]),
            Path(args.plot_dir) / "bench_times.png")
    return 0


# --- robustness ---

def run_robustness(record: EcgRecord, lead: str, stds: Sequence[float],
                   seed: int, metric_names: Sequence[str],
                   bandwidths: int = 100, threads: int = 1) -> dict[str, list[float]]:
    """Normalized mean |drift| per metric per noise level.

    Beat windows are fixed on the clean record; each noise level perturbs
    the same windows. Every metric is normalized by the absolute mean of its
    clean-signal values; beats where a metric is undefined on either side
    are left out for that metric.
    """
    base_cfg = baselines.BaselineConfig()
    fns = [(m, _metric_fn(m, base_cfg, bandwidths)) for m in metric_names]
    peaks = detect_r_peaks(record, lead)
    clean_beats = extract_beats(record, lead, peaks)
    if not clean_beats.beats:
        raise EcgMeeError("no beats extracted")

    def values_for(samples_list):
        per_metric = {}
        for name, fn in fns:
            def one(x, fn=fn):
                try:
                    return float(fn(x))
                except UndefinedEntropy:
                    return float("nan")
            per_metric[name] = np.array(_map_beats(one, samples_list, threads))
        return per_metric

    clean_vals = values_for([b.samples for b in clean_beats.beats])

    drift: dict[str, list[float]] = {name: [] for name, _ in fns}
    for std in stds:
        noisy = add_noise(record, NoiseSpec(kind="gaussian", std_dev=std, seed=seed))
        lead_samples = noisy.lead(lead)
        half = (clean_beats.beats[0].samples.size - 1) // 2
        noisy_windows = [lead_samples[b.r_index - half: b.r_index + half + 1]
                         for b in clean_beats.beats]
        noisy_vals = values_for(noisy_windows)
        for name, _ in fns:
            cv, nv = clean_vals[name], noisy_vals[name]
            valid = ~(np.isnan(cv) | np.isnan(nv))
            if not valid.any():
                drift[name].append(float("nan"))
                continue
            scale = abs(float(cv[valid].mean()))
            mean_abs = float(np.abs(nv[valid] - cv[valid]).mean())
            drift[name].append(mean_abs / scale if scale > 0 else mean_abs)
    return drift


def cmd_robustness(args) -> int:
    record = _load(args)
    lead = _resolve_lead(record, args.lead)
    stds = [float(s) for s in args.stds.split(",") if s.strip()]
    metrics = _parse_metric_list(args.metrics, BEAT_METRICS)
    drift = run_robustness(record, lead, stds, args.seed, metrics,
                           bandwidths=args.bandwidths,
                           threads=_thread_count(args))
    rows = [[_fmt(std)] + [_fmt(drift[m][i]) for m in metrics]
            for i, std in enumerate(stds)]
    _write_csv(rows, ["sigma"] + list(metrics), sys.stdout)
    if args.plot_dir:
        plots.save_figure(plots.robustness_figure(stds, drift),
                          Path(args.plot_dir) / "robustness_drift.png")
    return 0


# --- serve ---

def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(session_cap=args.session_cap,
                     size_cap_bytes=args.size_cap_mb * 1024 * 1024,
                     ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _json_clean(obj):
    """NaN/Inf are not valid JSON; serialize them as null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _json_clean(obj.item())
    return obj


def _add_record_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("record", help="record file (CSV or raw_f32)")
    p.add_argument("--lead", default=None, help="lead name (default: II or the only lead)")
    p.add_argument("--fs", type=float, default=None,
                   help="sampling rate in Hz (overrides any .meta sidecar)")
    p.add_argument("--format-in", choices=["csv", "raw_f32"], default="csv",
                   help="record file format")


def _add_common(p: argparse.ArgumentParser, fmt_default: str = "csv") -> None:
    p.add_argument("--bandwidths", type=int, default=100,
                   help="amplitude bins over [0,1] (default 100)")
    p.add_argument("--picking-bins", type=int, default=40,
                   help="bins for reference picking / pruning (default 40)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: MEE_THREADS or machine parallelism)")
    p.add_argument("--format", choices=["csv", "json"], default=fmt_default)
    p.add_argument("--plot-dir", default=None,
                   help="also render figures into this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecgmee",
        description="Beat-level ECG morphological entropy toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-beat metric table for one record")
    _add_record_args(p)
    _add_common(p)
    p.add_argument("--metrics", default=DEFAULT_ANALYZE_METRICS,
                   help=f"comma list from: {', '.join(BEAT_METRICS)}")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("screen", help="flag abnormal beats in one record")
    _add_record_args(p)
    _add_common(p)
    p.add_argument("--variant", type=int, choices=[1, 2, 3, 4], default=2,
                   help="metric combination (default 2)")
    p.add_argument("--alpha", type=float, default=None,
                   help="fluctuation-ratio threshold")
    p.add_argument("--grid", action="store_true",
                   help="grid-search the threshold (needs labels)")
    p.add_argument("--grid-min", type=float, default=screening.DEFAULT_GRID[0])
    p.add_argument("--grid-max", type=float, default=screening.DEFAULT_GRID[1])
    p.add_argument("--grid-step", type=float, default=screening.DEFAULT_GRID[2])
    p.add_argument("--curve-out", default=None,
                   help="write the (alpha, ACC, SPE, F1) curve CSV here")
    p.add_argument("--include-sveb", action="store_true",
                   help="score S-labeled beats too (excluded by default)")
    p.set_defaults(fn=cmd_screen)

    p = sub.add_parser("prune", help="representative pruning of a record group")
    p.add_argument("records", nargs="*", help="record files to score")
    p.add_argument("--scores", default=None,
                   help="skip scoring; read a record_id,label,record_mee CSV")
    p.add_argument("--scores-out", default=None, help="write computed scores CSV")
    p.add_argument("--label", default="", help="group label for scored records")
    p.add_argument("--lead", default=None)
    p.add_argument("--fs", type=float, default=None)
    p.add_argument("--variant", type=int, choices=[1, 2, 3, 4], default=2)
    p.add_argument("--keep-per-bin", type=int, default=1)
    p.add_argument("--random", type=int, default=None,
                   help="random-prune to this many records instead")
    p.add_argument("--out", default=None, help="manifest JSON path (default stdout)")
    _add_common(p, fmt_default="json")
    p.set_defaults(fn=cmd_prune)

    p = sub.add_parser("quality", help="flag poor-quality beats")
    _add_record_args(p)
    _add_common(p, fmt_default="json")
    p.add_argument("--variant", type=int, choices=[1, 2, 3, 4], default=2)
    p.add_argument("--edge-bins", type=int, default=quality.DEFAULT_EDGE_BINS)
    p.add_argument("--z-threshold", type=float, default=quality.DEFAULT_Z_THRESHOLD)
    p.set_defaults(fn=cmd_quality)

    p = sub.add_parser("bench", help="per-beat timing of the metric kernels")
    _add_common(p)
    p.add_argument("--beat-length", type=int, default=289)
    p.add_argument("--reps", type=int, default=1000,
                   help=f"timed repetitions (>= {MIN_BENCH_REPS})")
    p.add_argument("--metrics", default=DEFAULT_BENCH_METRICS)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("robustness", help="metric drift under additive noise")
    _add_record_args(p)
    _add_common(p)
    p.add_argument("--stds", default=DEFAULT_STDS,
                   help="comma list of noise std devs")
    p.add_argument("--metrics", default=DEFAULT_ROBUSTNESS_METRICS)
    p.set_defaults(fn=cmd_robustness)

    p = sub.add_parser("serve", help="run the HTTP analysis service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8800)
    p.add_argument("--session-cap", type=int, default=32)
    p.add_argument("--size-cap-mb", type=int, default=64)
    p.add_argument("--ui-dir", default=None,
                   help="static UI directory to serve at /")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (EcgMeeError, ValueError, OSError) as exc:
        print(f"ecgmee: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
