"""Record I/O and synthesis.

Canonical on-disk formats:

* CSV: header row names the columns; the first column is a sample index or
  time stamp (ignored on load), every further column is one lead in mV.
  The sampling rate comes from the caller or from a ``<basename>.meta``
  sidecar containing a line ``fs=<hz>``.
* raw_f32: little-endian IEEE 32-bit floats, single lead; the sampling rate
  must be supplied by the caller (or a .meta sidecar).
* Annotations: optional ``<basename>.ann`` sidecar with lines
  ``<sample_index>,<label>`` where label is one of N,S,V,F,Q,O.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import LengthMismatch, MalformedHeader, NonMonotonicAnnotations

BEAT_LABELS = frozenset("NSVFQO")


@dataclass
class EcgRecord:
    """A multi-lead sampled waveform plus optional beat annotations.

    Leads are an ordered list of (name, samples-in-mV); all leads have equal
    length >= 2. Annotation indices are strictly increasing sample positions.
    Records are treated as immutable after construction: the sample arrays
    are marked read-only so they can be shared across workers.
    """

    record_id: str
    sampling_rate_hz: float
    leads: list[tuple[str, np.ndarray]]
    annotations: Optional[list[tuple[int, str]]] = None

    def __post_init__(self):
        if self.sampling_rate_hz <= 0:
            raise ValueError(f"sampling_rate_hz must be positive, got {self.sampling_rate_hz}")
        if not self.leads:
            raise MalformedHeader("record has no leads")
        normalized = []
        n = None
        for name, samples in self.leads:
            arr = np.asarray(samples, dtype=np.float64)
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise LengthMismatch(
                    f"lead {name!r} has {arr.size} samples, expected {n}"
                )
            arr = arr.copy() if arr.base is not None or arr.flags.writeable else arr
            arr.setflags(write=False)
            normalized.append((str(name), arr))
        if n is None or n < 2:
            raise MalformedHeader("leads must contain at least 2 samples")
        self.leads = normalized
        if self.annotations is not None:
            prev = -1
            for idx, label in self.annotations:
                if label not in BEAT_LABELS:
                    raise MalformedHeader(f"unknown beat label {label!r}")
                if not (0 <= idx < n):
                    raise NonMonotonicAnnotations(
                        f"annotation index {idx} outside [0, {n})"
                    )
                if idx <= prev:
                    raise NonMonotonicAnnotations(
                        f"annotation indices not strictly increasing at {idx}"
                    )
                prev = idx

    @property
    def n_samples(self) -> int:
        return self.leads[0][1].size

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sampling_rate_hz

    @property
    def lead_names(self) -> list[str]:
        return [name for name, _ in self.leads]

    def lead(self, name: str) -> np.ndarray:
        for lead_name, samples in self.leads:
            if lead_name == name:
                return samples
        raise KeyError(name)


@dataclass
class NoiseSpec:
    """Additive per-sample noise description."""

    kind: str = "gaussian"
    std_dev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported noise kind {self.kind!r}")
        if self.std_dev < 0:
            raise ValueError("std_dev must be >= 0")


def _read_meta_fs(path: Path) -> Optional[float]:
    meta = path.with_suffix(".meta")
    if not meta.exists():
        return None
    for line in meta.read_text().splitlines():
        line = line.strip()
        if line.startswith("fs="):
            try:
                return float(line[3:])
            except ValueError as exc:
                raise MalformedHeader(f"bad fs value in {meta}: {line!r}") from exc
    return None


def _read_annotations(path: Path) -> Optional[list[tuple[int, str]]]:
    ann = path.with_suffix(".ann")
    if not ann.exists():
        return None
    out: list[tuple[int, str]] = []
    for ln, line in enumerate(ann.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedHeader(f"{ann}:{ln}: expected '<index>,<label>'")
        try:
            idx = int(parts[0])
        except ValueError as exc:
            raise MalformedHeader(f"{ann}:{ln}: bad sample index {parts[0]!r}") from exc
        out.append((idx, parts[1].strip()))
    return out


def load_record(
    path: str | Path,
    format: str = "csv",
    sampling_rate_hz: Optional[float] = None,
    record_id: Optional[str] = None,
) -> EcgRecord:
    """Load a record from CSV or raw_f32, attaching any .ann sidecar.

    The sampling rate is taken from `sampling_rate_hz` when given, otherwise
    from a `.meta` sidecar; MalformedHeader is raised if neither supplies it.
    """
    path = Path(path)
    if record_id is None:
        record_id = path.stem
    fs = sampling_rate_hz if sampling_rate_hz is not None else _read_meta_fs(path)
    if fs is None or fs <= 0:
        raise MalformedHeader(
            f"{path}: sampling rate unknown; pass sampling_rate_hz or add a .meta sidecar"
        )

    if format == "csv":
        leads = _load_csv(path)
    elif format == "raw_f32":
        samples = np.fromfile(path, dtype="<f4").astype(np.float64)
        if samples.size < 2:
            raise MalformedHeader(f"{path}: raw_f32 file holds fewer than 2 samples")
        leads = [("ch1", samples)]
    else:
        raise ValueError(f"unknown format {format!r}")

    annotations = _read_annotations(path)
    return EcgRecord(record_id=record_id, sampling_rate_hz=float(fs), leads=leads,
                     annotations=annotations)


def _load_csv(path: Path) -> list[tuple[str, np.ndarray]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeader(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise MalformedHeader(f"{path}: header must name at least one lead column")
        lead_names = header[1:]
        columns: list[list[float]] = [[] for _ in lead_names]
        for ln, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise LengthMismatch(
                    f"{path}:{ln}: expected {len(header)} fields, got {len(row)}"
                )
            for col, value in zip(columns, row[1:]):
                try:
                    col.append(float(value))
                except ValueError as exc:
                    raise MalformedHeader(f"{path}:{ln}: non-numeric sample {value!r}") from exc
    if not columns[0]:
        raise MalformedHeader(f"{path}: no sample rows")
    return [(name, np.asarray(col, dtype=np.float64)) for name, col in zip(lead_names, columns)]


def save_record(record: EcgRecord, path: str | Path, write_meta: bool = True) -> None:
    """Write a record as CSV (plus .meta and .ann sidecars).

    Samples are printed with enough digits that a load round-trip agrees to
    well under 1e-6 absolute.
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index"] + record.lead_names)
        arrays = [samples for _, samples in record.leads]
        for i in range(record.n_samples):
            writer.writerow([i] + [format(a[i], ".10g") for a in arrays])
    if write_meta:
        path.with_suffix(".meta").write_text(f"fs={record.sampling_rate_hz:g}\n")
    if record.annotations:
        lines = "".join(f"{idx},{label}\n" for idx, label in record.annotations)
        path.with_suffix(".ann").write_text(lines)


def synth_ecg(
    sampling_rate_hz: float,
    duration_s: float,
    bpm: float,
    seed: int,
    jitter: float = 0.0,
) -> EcgRecord:
    """Deterministic pseudo-ECG: P/QRS/T Gaussian bumps at known R indices.

    R peaks sit at (k + 0.5) cycle intervals so every beat window fits, and
    each one is recorded in the annotation list as a normal (N) beat.
    `jitter` scales per-beat amplitudes by uniform(1-jitter, 1+jitter) drawn
    from `seed`; at the default 0.0 the beats are exactly identical.
    """
    if sampling_rate_hz <= 0 or duration_s <= 0 or bpm <= 0:
        raise ValueError("sampling_rate_hz, duration_s and bpm must be positive")
    n = int(round(duration_s * sampling_rate_hz))
    if n < 2:
        raise ValueError("duration_s * sampling_rate_hz must be >= 2")
    fs = float(sampling_rate_hz)
    period_s = 60.0 / bpm
    n_beats = int(math.floor(duration_s * bpm / 60.0))
    rng = np.random.default_rng(seed)

    t = np.arange(n) / fs
    x = np.zeros(n)
    r_indices = []
    # amplitude ratios P:QRS:T = 0.15 : 1.0 : 0.3 (internal constant); the
    # small negative S dip keeps the isoelectric line off the amplitude floor
    waves = (
        (0.15, -0.20, 0.035),
        (1.0, 0.0, 0.016),
        (-0.25, 0.045, 0.018),
        (0.30, 0.28, 0.055),
    )
    for k in range(n_beats):
        r_time = (k + 0.5) * period_s
        r_idx = int(round(r_time * fs))
        if r_idx >= n:
            break
        scale = rng.uniform(1.0 - jitter, 1.0 + jitter) if jitter > 0 else 1.0
        center = r_idx / fs
        for amp, offset, width in waves:
            x += scale * amp * np.exp(-0.5 * ((t - (center + offset)) / width) ** 2)
        r_indices.append(r_idx)

    annotations = [(idx, "N") for idx in r_indices]
    record_id = f"synth-{fs:g}hz-{duration_s:g}s-{bpm:g}bpm-seed{seed}"
    return EcgRecord(record_id=record_id, sampling_rate_hz=fs,
                     leads=[("II", x)], annotations=annotations)


def invert_cycles(
    record: EcgRecord,
    annotation_positions: Sequence[int],
    label: str = "V",
) -> EcgRecord:
    """Sign-flip whole cycles around selected annotated beats.

    Used to inject morphological outliers into synthetic records; the
    flipped beats are relabeled (V by default). `annotation_positions`
    index into record.annotations. The cycle half-width is half the median
    annotation spacing, so the flip boundaries fall on the isoelectric line.
    """
    if not record.annotations or len(record.annotations) < 2:
        raise ValueError("invert_cycles needs a record with >= 2 annotations")
    r_indices = [idx for idx, _ in record.annotations]
    half = int(np.median(np.diff(r_indices)) // 2)
    leads = [(name, samples.copy()) for name, samples in record.leads]
    n = record.n_samples
    annotations = list(record.annotations)
    for pos in annotation_positions:
        r = r_indices[pos]
        lo, hi = max(0, r - half), min(n, r + half)
        for _, samples in leads:
            samples[lo:hi] *= -1.0
        annotations[pos] = (r, label)
    return EcgRecord(
        record_id=record.record_id,
        sampling_rate_hz=record.sampling_rate_hz,
        leads=leads,
        annotations=annotations,
    )


def add_noise(record: EcgRecord, spec: NoiseSpec) -> EcgRecord:
    """Return a copy of `record` with i.i.d. Gaussian noise on every lead."""
    rng = np.random.default_rng(spec.seed)
    leads = []
    for name, samples in record.leads:
        noisy = samples + rng.normal(0.0, spec.std_dev, samples.size)
        leads.append((name, noisy))
    annotations = list(record.annotations) if record.annotations is not None else None
    return EcgRecord(
        record_id=record.record_id,
        sampling_rate_hz=record.sampling_rate_hz,
        leads=leads,
        annotations=annotations,
    )
