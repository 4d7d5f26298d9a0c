"""Accuracy and latency measurement over a ground-truth manifest.

Recognition sees only pixels; truth is consulted after the fact to score
exact-string matches, per-position character accuracy, localization IoU
of the top candidate, and wall-clock latency per stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import load_manifest
from .glyphs import GlyphTemplate
from .grammar import ConfusionTable, PlateGrammar
from .locate import LocalizerParams
from .pipeline import STAGE_NAMES, recognize_bytes


@dataclass
class FrameScore:
    """Per-frame evaluation row."""

    index: int
    file: str
    true_plate: str
    read_plate: str | None
    exact: bool
    char_matches: int
    char_total: int
    iou: float
    total_ms: float
    timings_ms: dict[str, float]
    tags: list[str] = field(default_factory=list)


@dataclass
class EvalSummary:
    """Corpus-level rates plus the latency breakdown."""

    n: int
    plate_exact_rate: float
    char_accuracy: float
    localization_iou_mean: float
    mean_latency_ms: float
    p95_latency_ms: float
    stage_mean_ms: dict[str, float]
    stage_p95_ms: dict[str, float]
    rows: list[FrameScore] = field(default_factory=list)


def box_iou(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> float:
    """Intersection-over-union of two half-open boxes (x0, y0, x1, y1)."""
    ix0, iy0 = max(a[0], b[0]), max(a[1], b[1])
    ix1, iy1 = min(a[2], b[2]), min(a[3], b[3])
    iw, ih = max(ix1 - ix0, 0.0), max(iy1 - iy0, 0.0)
    inter = iw * ih
    area_a = max(a[2] - a[0], 0.0) * max(a[3] - a[1], 0.0)
    area_b = max(b[2] - b[0], 0.0) * max(b[3] - b[1], 0.0)
    union = area_a + area_b - inter
    return inter / union if union > 0 else 0.0


def score_frame(record: dict, *, params: LocalizerParams | None = None,
                templates: list[GlyphTemplate] | None = None,
                grammar: PlateGrammar | None = None,
                confusion: ConfusionTable | None = None) -> FrameScore:
    """Recognize one manifest image and score it against its record."""
    data = Path(record["file"]).read_bytes()
    result = recognize_bytes(data, params=params, templates=templates,
                             grammar=grammar, confusion=confusion)
    true_plate = record["plate"]
    best = result.best

    read_plate = best.plate_string if best is not None else None
    exact = read_plate == true_plate
    if read_plate is not None and len(read_plate) == len(true_plate):
        char_matches = sum(a == b for a, b in zip(read_plate, true_plate))
        char_total = len(true_plate)
    else:
        char_matches = char_total = 0

    iou = 0.0
    if best is not None:
        x0, y0, x1, y1 = best.candidate.box
        iou = box_iou((x0, y0, x1 + 1.0, y1 + 1.0), tuple(record["box"]))

    return FrameScore(
        index=record.get("index", -1),
        file=record["file"],
        true_plate=true_plate,
        read_plate=read_plate,
        exact=exact,
        char_matches=char_matches,
        char_total=char_total,
        iou=iou,
        total_ms=result.total_ms,
        timings_ms=dict(result.timings_ms),
        tags=list(record.get("tags", [])),
    )


def summarize(rows: list[FrameScore]) -> EvalSummary:
    """Reduce per-frame scores order-independently."""
    if not rows:
        raise ValueError("nothing to summarize: zero evaluation rows")
    n = len(rows)
    totals = np.array([r.total_ms for r in rows])
    char_total = sum(r.char_total for r in rows)
    stage_mean = {}
    stage_p95 = {}
    for stage in STAGE_NAMES:
        series = np.array([r.timings_ms.get(stage, 0.0) for r in rows])
        stage_mean[stage] = float(series.mean())
        stage_p95[stage] = float(np.percentile(series, 95))
    return EvalSummary(
        n=n,
        plate_exact_rate=sum(r.exact for r in rows) / n,
        char_accuracy=(sum(r.char_matches for r in rows) / char_total) if char_total else 0.0,
        localization_iou_mean=float(np.mean([r.iou for r in rows])),
        mean_latency_ms=float(totals.mean()),
        p95_latency_ms=float(np.percentile(totals, 95)),
        stage_mean_ms=stage_mean,
        stage_p95_ms=stage_p95,
        rows=rows,
    )


def evaluate_manifest(manifest_path: str | Path, *, limit: int | None = None,
                      params: LocalizerParams | None = None,
                      templates: list[GlyphTemplate] | None = None,
                      grammar: PlateGrammar | None = None,
                      confusion: ConfusionTable | None = None) -> EvalSummary:
    """Run the full pipeline over every manifest image and summarize."""
    records = load_manifest(manifest_path)
    if limit is not None:
        records = records[:limit]
    if not records:
        raise ValueError(f"manifest {manifest_path} holds no records")
    rows = [score_frame(rec, params=params, templates=templates,
                        grammar=grammar, confusion=confusion) for rec in records]
    return summarize(rows)
