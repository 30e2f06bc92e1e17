"""Record-level scoring and representative pruning of same-label groups.

A record's score is the mean per-beat metric over its interior beats (the
first and last detected beats are dropped to avoid edge effects). Pruning
histograms the scores of one label group and keeps, per occupied bin, the
records closest to the bin center, so every region of the score range stays
represented; a seeded random pruner serves as the control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyGroup, TargetOutOfRange, TooFewBeats
from .io import EcgRecord
from .morphology import MorphConfig, morph_values
from .segmentation import segment_record


@dataclass
class RecordScore:
    record_id: str
    label: str
    record_mee: float
    beat_count_used: int


@dataclass
class PruneManifest:
    kept: list[str]
    dropped: list[str]
    bin_assignment: dict[str, int] = field(default_factory=dict)
    bin_count: int = 0

    def as_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped": self.dropped,
            "bin_assignment": self.bin_assignment,
            "bin_count": self.bin_count,
        }


def pick_lead(record: EcgRecord, preferred: str = "II") -> str:
    """Lead II when present, else the first lead (multi-lead records are
    scored on the representative lead)."""
    if preferred in record.lead_names:
        return preferred
    return record.lead_names[0]


def record_mee(
    record: EcgRecord,
    lead_name: str,
    cfg: MorphConfig,
    label: str = "",
) -> RecordScore:
    """Mean beat metric over the record's interior beats."""
    extraction = segment_record(record, lead_name)
    beats = extraction.beats
    if len(beats) < 3:
        raise TooFewBeats(
            f"{record.record_id}: need >= 3 beats to score, got {len(beats)}"
        )
    interior = beats[1:-1]
    values = [morph_values(b.samples, cfg).mee for b in interior]
    return RecordScore(
        record_id=record.record_id,
        label=label,
        record_mee=float(np.mean(values)),
        beat_count_used=len(interior),
    )


def assign_bins(scores: Sequence[RecordScore], bin_count: int) -> dict[str, int]:
    """Equal-width histogram assignment of record scores over [min, max]."""
    if not scores:
        raise EmptyGroup("no records to bin")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    values = np.array([s.record_mee for s in scores])
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return {s.record_id: 0 for s in scores}
    idx = np.minimum(((values - lo) / (hi - lo) * bin_count).astype(np.int64),
                     bin_count - 1)
    return {s.record_id: int(i) for s, i in zip(scores, idx)}


def prune_by_mee(
    scores: Sequence[RecordScore],
    bin_count: int,
    keep_per_bin: int,
) -> PruneManifest:
    """Keep, per occupied score bin, the keep_per_bin records closest to the
    bin center (ties by record_id); drop the rest."""
    scores = list(scores)
    if not scores:
        raise EmptyGroup("prune_by_mee needs at least one record")
    if keep_per_bin < 1:
        raise ValueError("keep_per_bin must be >= 1")
    assignment = assign_bins(scores, bin_count)
    values = np.array([s.record_mee for s in scores])
    lo, hi = float(values.min()), float(values.max())
    width = (hi - lo) / bin_count if hi > lo else 0.0

    by_bin: dict[int, list[RecordScore]] = {}
    for s in scores:
        by_bin.setdefault(assignment[s.record_id], []).append(s)

    kept: list[str] = []
    dropped: list[str] = []
    for bin_idx, members in sorted(by_bin.items()):
        center = lo + (bin_idx + 0.5) * width if width else lo
        members.sort(key=lambda s: (abs(s.record_mee - center), s.record_id))
        kept.extend(s.record_id for s in members[:keep_per_bin])
        dropped.extend(s.record_id for s in members[keep_per_bin:])
    return PruneManifest(
        kept=sorted(kept),
        dropped=sorted(dropped),
        bin_assignment=assignment,
        bin_count=bin_count,
    )


def prune_random(ids: Sequence[str], target_count: int, seed: int) -> PruneManifest:
    """Uniform random subset of size target_count, deterministic per seed."""
    ids = list(ids)
    if not ids:
        raise EmptyGroup("prune_random needs at least one record")
    if not (1 <= target_count <= len(ids)):
        raise TargetOutOfRange(
            f"target_count must be in [1, {len(ids)}], got {target_count}"
        )
    rng = np.random.default_rng(seed)
    keep_idx = set(rng.choice(len(ids), size=target_count, replace=False).tolist())
    kept = [ids[i] for i in sorted(keep_idx)]
    dropped = [ids[i] for i in range(len(ids)) if i not in keep_idx]
    return PruneManifest(kept=kept, dropped=dropped, bin_assignment={}, bin_count=0)


def coverage_holds(manifest_kept: Sequence[str], assignment: dict[str, int]) -> bool:
    """True when every occupied bin of `assignment` has a kept record."""
    kept = set(manifest_kept)
    occupied = set(assignment.values())
    covered = {b for rid, b in assignment.items() if rid in kept}
    return occupied == covered
