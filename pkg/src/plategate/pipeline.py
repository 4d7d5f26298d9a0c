"""End-to-end frame recognition: pixels in, validated plate reads out.

Composes the stage modules in fixed order — grayscale, localization,
skew estimation, rectification, contrast/median enhancement, character
reading, grammar validation — and records wall-clock time per stage.
Intermediate rasters for every stage can be dumped to a directory for
visual inspection.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imgio
from .glyphs import GlyphTemplate, default_templates
from .grammar import (ConfusionTable, PlateGrammar, ValidationReport, default_grammar,
                      load_grammar, validate)
from .locate import (
    CanonicalPlate,
    EmptyRegion,
    FrameTooSmall,
    LocalizerParams,
    PlateCandidate,
    box_average,
    estimate_skew,
    locate_plates,
    rectify,
)
from .ocr import PlateRead, binarize_plate, read_plate, segment_characters, strip_frame_lines
from .raster import (
    BinaryRaster,
    ColorRaster,
    DegenerateQuad,
    GrayRaster,
    RasterTooSmall,
    median_filter,
    normalize_contrast,
    sobel_components,
    to_grayscale,
)

STAGE_NAMES = ("decode", "grayscale", "localize", "skew", "rectify", "enhance", "recognize", "validate")

ENHANCE_LOW_PCT = 1
ENHANCE_HIGH_PCT = 99
ENHANCE_MEDIAN_RADIUS = 1
DEFAULT_MAX_CANDIDATES = 3


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass
class PlateResult:
    """One localized candidate carried through to a validated read."""

    candidate: PlateCandidate
    canonical: CanonicalPlate
    read: PlateRead
    report: ValidationReport

    @property
    def plate_string(self) -> str:
        """Corrected string when the grammar accepted it, else the raw read."""
        return self.report.corrected if self.report.corrected is not None else self.read.raw_string

    @property
    def confidence(self) -> float:
        return self.read.plate_confidence


@dataclass
class FrameResult:
    """All candidate reads for one frame plus per-stage timings (ms)."""

    results: list[PlateResult] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=lambda: {name: 0.0 for name in STAGE_NAMES})

    @property
    def best(self) -> PlateResult | None:
        return self.results[0] if self.results else None

    @property
    def total_ms(self) -> float:
        return sum(self.timings_ms.values())


class _StageClock:
    """Accumulates perf-counter durations into a timing dict."""

    def __init__(self, timings: dict[str, float]) -> None:
        self._timings = timings
        self._mark = time.perf_counter()

    def lap(self, stage: str) -> None:
        now = time.perf_counter()
        self._timings[stage] += (now - self._mark) * 1000.0
        self._mark = now


# ---------------------------------------------------------------------------
# Recognition
# ---------------------------------------------------------------------------

def enhance_canonical(plate: CanonicalPlate) -> CanonicalPlate:
    """Contrast-stretch and despeckle the canonical strip."""
    enhanced = median_filter(
        normalize_contrast(plate.raster, ENHANCE_LOW_PCT, ENHANCE_HIGH_PCT),
        ENHANCE_MEDIAN_RADIUS,
    )
    return dataclasses.replace(plate, raster=enhanced)


def recognize_frame(
    image: ColorRaster | GrayRaster,
    *,
    params: LocalizerParams | None = None,
    templates: list[GlyphTemplate] | None = None,
    grammar: PlateGrammar | str | None = None,
    confusion: ConfusionTable | None = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> FrameResult:
    """Run the full stage chain on a decoded frame.

    `grammar` may be a parsed PlateGrammar or raw grammar config text.
    Candidates that collapse during rectification or contain no ink are
    dropped rather than raising; an empty result list means no readable
    plate was found.
    """
    params = params if params is not None else LocalizerParams()
    templates = templates if templates is not None else default_templates()
    if grammar is None:
        grammar = default_grammar()
    elif isinstance(grammar, str):
        grammar = load_grammar(grammar)

    out = FrameResult()
    clock = _StageClock(out.timings_ms)

    gray = image if isinstance(image, GrayRaster) else to_grayscale(image)
    clock.lap("grayscale")

    try:
        candidates = locate_plates(gray, params)
    except FrameTooSmall:
        clock.lap("localize")
        return out
    clock.lap("localize")

    for candidate in candidates[:max_candidates]:
        try:
            skew = estimate_skew(gray, candidate)
        except EmptyRegion:
            clock.lap("skew")
            continue
        located = dataclasses.replace(candidate, skew_deg=skew)
        clock.lap("skew")

        try:
            canonical = rectify(gray, located)
        except DegenerateQuad:
            clock.lap("rectify")
            continue
        clock.lap("rectify")

        canonical = enhance_canonical(canonical)
        clock.lap("enhance")

        read = read_plate(canonical, templates)
        clock.lap("recognize")
        if not read.chars:
            continue

        report = validate(read, grammar, confusion)
        clock.lap("validate")
        out.results.append(PlateResult(candidate=located, canonical=canonical, read=read, report=report))

    return out


def recognize_bytes(data: bytes, **kwargs) -> FrameResult:
    """Decode raw image bytes and recognize; decode time lands in timings."""
    start = time.perf_counter()
    image = imgio.decode_image(data)
    decode_ms = (time.perf_counter() - start) * 1000.0
    result = recognize_frame(image, **kwargs)
    result.timings_ms["decode"] += decode_ms
    return result


# ---------------------------------------------------------------------------
# Stage dumps
# ---------------------------------------------------------------------------

def _to_u8(values: np.ndarray) -> GrayRaster:
    """Min-max scale an arbitrary array to a displayable grayscale raster."""
    v = values.astype(np.float64)
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        return GrayRaster(np.zeros(v.shape, dtype=np.uint8))
    scaled = (v - lo) * (255.0 / (hi - lo))
    return GrayRaster(np.floor(scaled + 0.5).astype(np.uint8))


def _binary_view(binary: BinaryRaster) -> GrayRaster:
    return GrayRaster(np.where(binary.ink, 0, 255).astype(np.uint8))


def _draw_box(gray: GrayRaster, box: tuple[int, int, int, int], value: int = 255) -> None:
    x0, y0, x1, y1 = box
    x0 = max(0, min(gray.width - 1, x0))
    x1 = max(0, min(gray.width - 1, x1))
    y0 = max(0, min(gray.height - 1, y0))
    y1 = max(0, min(gray.height - 1, y1))
    gray.pixels[y0, x0:x1 + 1] = value
    gray.pixels[y1, x0:x1 + 1] = value
    gray.pixels[y0:y1 + 1, x0] = value
    gray.pixels[y0:y1 + 1, x1] = value


def dump_stages(
    image: ColorRaster | GrayRaster,
    out_dir: str | Path,
    *,
    params: LocalizerParams | None = None,
    templates: list[GlyphTemplate] | None = None,
    grammar: PlateGrammar | str | None = None,
    confusion: ConfusionTable | None = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> list[Path]:
    """Write every intermediate stage image to `out_dir`; returns paths written."""
    params = params if params is not None else LocalizerParams()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, gray: GrayRaster) -> None:
        path = out_dir / f"{name}.pgm"
        imgio.save_pgm(path, gray)
        written.append(path)

    if isinstance(image, ColorRaster):
        path = out_dir / "00_input.ppm"
        path.write_bytes(imgio.encode_ppm(image))
        written.append(path)
        gray = to_grayscale(image)
    else:
        emit("00_input", image)
        gray = image
    emit("01_gray", gray)

    try:
        gx, _gy = sobel_components(gray)
        density = box_average(np.abs(gx), *params.density_window)
        emit("02_edge_density", _to_u8(density))
        candidates = locate_plates(gray, params)
    except (FrameTooSmall, RasterTooSmall):
        return written

    overlay = GrayRaster(gray.pixels.copy())
    for candidate in candidates[:max_candidates]:
        x0, y0, x1, y1 = candidate.box
        _draw_box(overlay, (int(x0), int(y0), int(x1), int(y1)))
    emit("03_candidates", overlay)

    result = recognize_frame(
        image, params=params, templates=templates, grammar=grammar,
        confusion=confusion, max_candidates=max_candidates,
    )
    for k, plate in enumerate(result.results):
        emit(f"10_c{k}_canonical", plate.canonical.raster)
        binary = binarize_plate(plate.canonical)
        emit(f"11_c{k}_binary", _binary_view(binary))
        stripped = strip_frame_lines(binary)
        emit(f"12_c{k}_stripped", _binary_view(stripped))
        seg_view = _binary_view(stripped)
        for box in segment_characters(stripped):
            _draw_box(seg_view, (box.x0, box.y0, box.x1 - 1, box.y1 - 1), value=128)
        emit(f"13_c{k}_segments", seg_view)
    return written
