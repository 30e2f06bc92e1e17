"""Embedded HTTP service backing the review UI.

Sessions hold one uploaded record, its segmentation, and per-variant series
caches; the store is a bounded LRU. All numeric payloads are finite doubles
(NaN/Inf serialize as null), and repeated reads of a cached series return
byte-identical JSON.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from time import time
from typing import Optional

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import screening
from .errors import EcgMeeError
from .io import BEAT_LABELS, EcgRecord, _load_csv
from .morphology import MorphConfig, morph_values
from .segmentation import Beat, detect_r_peaks, extract_beats

DEFAULT_SESSION_CAP = 32
DEFAULT_SIZE_CAP = 64 * 1024 * 1024
DEFAULT_BUCKETS = 2000
MAX_BUCKETS = 20000


@dataclass
class Session:
    session_id: str
    record: EcgRecord
    lead: str
    beats: list[Beat]
    created_at: float = field(default_factory=time)
    lock: threading.Lock = field(default_factory=threading.Lock)
    series_cache: dict[int, bytes] = field(default_factory=dict)
    series_values: dict[int, screening.MeeSeries] = field(default_factory=dict)


class SessionStore:
    """Thread-safe LRU map of session_id -> Session."""

    def __init__(self, cap: int):
        self.cap = cap
        self._lock = threading.Lock()
        self._sessions: OrderedDict[str, Session] = OrderedDict()

    def put(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.session_id] = session
            self._sessions.move_to_end(session.session_id)
            while len(self._sessions) > self.cap:
                self._sessions.popitem(last=False)

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            self._sessions.move_to_end(session_id)
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(float(v)) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    return obj


def _downsample(samples: np.ndarray, buckets: int) -> list[list[float]]:
    """Min/max pair per bucket; full resolution when the record is short."""
    n = samples.size
    if n <= buckets:
        return [[float(v), float(v)] for v in samples]
    edges = np.linspace(0, n, buckets + 1).astype(int)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        chunk = samples[lo:hi] if hi > lo else samples[lo:lo + 1]
        out.append([float(chunk.min()), float(chunk.max())])
    return out


def _parse_annotations(text: str, n_samples: int) -> list[tuple[int, str]]:
    out = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2 or parts[1].strip() not in BEAT_LABELS:
            raise HTTPException(status_code=400,
                                detail=f"annotation line {ln} is malformed")
        idx = int(parts[0])
        if not (0 <= idx < n_samples):
            raise HTTPException(status_code=400,
                                detail=f"annotation index {idx} out of range")
        out.append((idx, parts[1].strip()))
    return out


def _require_variant(variant: int) -> MorphConfig:
    if variant not in (1, 2, 3, 4):
        raise HTTPException(status_code=422, detail="variant must be 1..4")
    return MorphConfig.for_variant(variant)


def create_app(
    session_cap: int = DEFAULT_SESSION_CAP,
    size_cap_bytes: int = DEFAULT_SIZE_CAP,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="ecgmee service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(session_cap)
    app.state.store = store

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/records")
    async def upload_record(
        file: UploadFile = File(...),
        fs: float = Form(...),
        lead: Optional[str] = Form(None),
        ann: Optional[UploadFile] = File(None),
    ):
        body = await file.read()
        if not body:
            raise HTTPException(status_code=400, detail="empty body")
        if len(body) > size_cap_bytes:
            raise HTTPException(status_code=413, detail="record too large")
        if fs <= 0:
            raise HTTPException(status_code=400, detail="fs must be positive")
        import tempfile

        try:
            with tempfile.NamedTemporaryFile(suffix=".csv") as tmp:
                tmp.write(body)
                tmp.flush()
                leads = _load_csv(Path(tmp.name))
        except EcgMeeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        annotations = None
        if ann is not None:
            ann_body = (await ann.read()).decode()
            n = leads[0][1].size
            annotations = _parse_annotations(ann_body, n)

        try:
            record = EcgRecord(
                record_id=file.filename or "upload",
                sampling_rate_hz=fs,
                leads=leads,
                annotations=annotations,
            )
        except EcgMeeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        lead_names = record.lead_names
        if lead is None:
            if len(lead_names) == 1:
                lead = lead_names[0]
            elif "II" in lead_names:
                lead = "II"
            else:
                raise HTTPException(
                    status_code=400,
                    detail={"error": "pass a lead parameter", "leads": lead_names},
                )
        elif lead not in lead_names:
            raise HTTPException(
                status_code=400,
                detail={"error": f"lead {lead!r} not found", "leads": lead_names},
            )

        try:
            peaks = detect_r_peaks(record, lead)
            beats = extract_beats(record, lead, peaks)
        except EcgMeeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        session = Session(
            session_id=uuid.uuid4().hex,
            record=record,
            lead=lead,
            beats=beats.beats,
        )
        store.put(session)
        return {
            "session_id": session.session_id,
            "beat_count": len(session.beats),
            "duration_s": record.duration_s,
        }

    def _series(session: Session, variant: int) -> tuple[screening.MeeSeries, bytes]:
        cfg = _require_variant(variant)
        with session.lock:
            if variant in session.series_cache:
                return session.series_values[variant], session.series_cache[variant]
            if not session.beats:
                raise HTTPException(status_code=400, detail="record has no beats")
            results = [morph_values(b.samples, cfg) for b in session.beats]
            series = screening.mee_series(
                session.beats, cfg,
                record_id=session.record.record_id,
                values=np.array([r.mee for r in results]),
            )
            samples = session.record.lead(session.lead)
            payload = {
                "record_id": session.record.record_id,
                "variant": variant,
                "beat_indices": series.beat_indices,
                "r_indices": [b.r_index for b in session.beats],
                "labels": [b.label for b in session.beats],
                "values": series.values,
                "bwe": [r.bwe for r in results],
                "wse": [r.wse for r in results],
                "m_ref": series.m_ref,
                "sigma_m": series.sigma_m,
                "fluctuation": series.fluctuation,
                "sampling_rate_hz": session.record.sampling_rate_hz,
                "duration_s": session.record.duration_s,
                "waveform": _downsample(samples, DEFAULT_BUCKETS),
            }
            body = json.dumps(_clean(payload)).encode()
            session.series_cache[variant] = body
            session.series_values[variant] = series
            return series, body

    @app.get("/api/sessions/{session_id}/series")
    def get_series(session_id: str, variant: int = 2, buckets: int = DEFAULT_BUCKETS):
        session = store.get(session_id)
        if buckets == DEFAULT_BUCKETS:
            _, body = _series(session, variant)
            return Response(content=body, media_type="application/json")
        if not (1 <= buckets <= MAX_BUCKETS):
            raise HTTPException(status_code=422,
                                detail=f"buckets must be in 1..{MAX_BUCKETS}")
        _, body = _series(session, variant)
        payload = json.loads(body)
        payload["waveform"] = _clean(
            _downsample(session.record.lead(session.lead), buckets))
        return JSONResponse(payload)

    @app.get("/api/sessions/{session_id}/screen")
    def get_screen(session_id: str, variant: int = 2, alpha: float = 0.5,
                   include_sveb: bool = False):
        if alpha < 0:
            raise HTTPException(status_code=422, detail="alpha must be >= 0")
        session = store.get(session_id)
        series, _ = _series(session, variant)
        flags = screening.flag_beats(series, alpha)
        labels = [b.label for b in session.beats]
        payload = {
            "variant": variant,
            "alpha": alpha,
            "flagged": flags,
            "f": series.fluctuation,
            "M_ref": series.m_ref,
            "sigma_M": series.sigma_m,
        }
        if any(lbl is not None for lbl in labels):
            mask = screening.evaluation_mask(labels, include_sveb)
            idx = np.flatnonzero(mask)
            report = screening.evaluate([flags[i] for i in idx],
                                        [labels[i] for i in idx])
            payload["report"] = report.as_dict()
        return JSONResponse(_clean(payload))

    @app.get("/api/sessions/{session_id}/quality")
    def get_quality(session_id: str, variant: int = 2,
                    edge_bins: int = 1, z_threshold: float = 3.5):
        from .quality import assess_quality

        cfg = _require_variant(variant)
        session = store.get(session_id)
        if z_threshold <= 0:
            raise HTTPException(status_code=422, detail="z_threshold must be > 0")
        with session.lock:
            try:
                report = assess_quality(session.beats, cfg, edge_bins, z_threshold)
            except EcgMeeError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        return JSONResponse(_clean(report.as_dict()))

    @app.delete("/api/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not store.delete(session_id):
            raise HTTPException(status_code=404, detail="unknown session")
        return Response(status_code=204)

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
