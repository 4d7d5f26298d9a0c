"""Character recognition on the canonical plate strip: binarization with
polarity selection, frame-line removal, projection-profile segmentation and
pixel-agreement template matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .glyphs import TEMPLATE_H, TEMPLATE_W, GlyphTemplate, scale_bitmap_nn
from .locate import CANONICAL_H, CANONICAL_W, CanonicalPlate
from .raster import BinaryRaster, binarize, otsu_threshold

# binarization keeps the polarity whose ink fraction lands in this band
INK_FRACTION_LO = 0.05
INK_FRACTION_HI = 0.50
INK_FRACTION_TARGET = 0.20

RAIL_INK_RATIO = 0.85          # rows/cols above this ratio are border rails
BORDER_ELONGATION = 10.0       # min elongation for border-touching removal
MIN_SEGMENT_WIDTH = 6
MAX_MERGE_GAP = 2
SPLIT_WIDTH_FACTOR = 1.6
GAP_INK_THRESHOLD = 2          # columns with fewer ink pixels are gaps

_EIGHT_CONN = np.ones((3, 3), dtype=int)


@dataclass
class SegmentBox:
    """Half-open [x0, x1) x [y0, y1) character cell in canonical coords."""

    x0: int
    x1: int
    y0: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 <= CANONICAL_W and 0 <= self.y0 < self.y1 <= CANONICAL_H):
            raise ValueError(f"segment box out of canonical bounds: {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


@dataclass
class CharRead:
    """Best class for one glyph, with every runner-up score descending."""

    best: str
    confidence: float
    alternatives: list[tuple[str, float]]
    box: SegmentBox


@dataclass
class PlateRead:
    """Ordered per-character reads of one plate strip."""

    chars: list[CharRead] = field(default_factory=list)

    @property
    def raw_string(self) -> str:
        return "".join(c.best for c in self.chars)

    @property
    def plate_confidence(self) -> float:
        if not self.chars:
            return 0.0
        return sum(c.confidence for c in self.chars) / len(self.chars)


# ---------------------------------------------------------------------------
# Binarization and cleanup
# ---------------------------------------------------------------------------

def binarize_plate(plate: CanonicalPlate) -> BinaryRaster:
    """Otsu-binarize the strip, picking the polarity whose ink fraction is
    plausible for text (5..50%); outside that band for both polarities, the
    fraction closer to 20% wins."""
    t = otsu_threshold(plate.raster)
    dark = binarize(plate.raster, t, ink_is_dark=True)
    frac_dark = float(dark.ink.mean())
    if INK_FRACTION_LO <= frac_dark <= INK_FRACTION_HI:
        return dark
    light = BinaryRaster(~dark.ink)
    frac_light = 1.0 - frac_dark
    if INK_FRACTION_LO <= frac_light <= INK_FRACTION_HI:
        return light
    if abs(frac_dark - INK_FRACTION_TARGET) <= abs(frac_light - INK_FRACTION_TARGET):
        return dark
    return light


def strip_frame_lines(bin_plate: BinaryRaster) -> BinaryRaster:
    """Remove border rails: near-solid rows/columns, then elongated
    components touching two or more image borders."""
    ink = bin_plate.ink.copy()
    h, w = ink.shape
    ink[ink.mean(axis=1) > RAIL_INK_RATIO, :] = False
    ink[:, ink.mean(axis=0) > RAIL_INK_RATIO] = False

    labels, count = ndimage.label(ink, structure=_EIGHT_CONN)
    for i, sl in enumerate(ndimage.find_objects(labels), start=1):
        y0, y1 = sl[0].start, sl[0].stop
        x0, x1 = sl[1].start, sl[1].stop
        borders = (x0 == 0) + (y0 == 0) + (x1 == w) + (y1 == h)
        if borders < 2:
            continue
        ext = sorted((x1 - x0, y1 - y0))
        if ext[1] / max(ext[0], 1) > BORDER_ELONGATION:
            ink[labels == i] = False
    return BinaryRaster(ink)


# ---------------------------------------------------------------------------
# Segmentation
# ---------------------------------------------------------------------------

def _column_runs(profile: np.ndarray) -> list[list[int]]:
    """Maximal runs of non-gap columns as mutable [x0, x1) pairs."""
    nongap = profile >= GAP_INK_THRESHOLD
    runs = []
    x = 0
    w = len(profile)
    while x < w:
        if nongap[x]:
            start = x
            while x < w and nongap[x]:
                x += 1
            runs.append([start, x])
        else:
            x += 1
    return runs


def _merge_or_drop_narrow(runs: list[list[int]]) -> list[list[int]]:
    """Fold sub-minimum-width runs into the nearer neighbour when the gap
    allows, otherwise drop them."""
    runs = [list(r) for r in runs]
    changed = True
    while changed:
        changed = False
        for i, run in enumerate(runs):
            if run[1] - run[0] >= MIN_SEGMENT_WIDTH:
                continue
            left_gap = run[0] - runs[i - 1][1] if i > 0 else None
            right_gap = runs[i + 1][0] - run[1] if i < len(runs) - 1 else None
            target = None
            if left_gap is not None and (right_gap is None or left_gap <= right_gap):
                target, gap = i - 1, left_gap
            elif right_gap is not None:
                target, gap = i + 1, right_gap
            if target is not None and gap <= MAX_MERGE_GAP:
                lo = min(runs[target][0], run[0])
                hi = max(runs[target][1], run[1])
                runs[target][0], runs[target][1] = lo, hi
            runs.pop(i)
            changed = True
            break
    return runs


def _split_wide(runs: list[list[int]], profile: np.ndarray) -> list[list[int]]:
    """Split runs wider than SPLIT_WIDTH_FACTOR x median at the weakest
    column of their middle third."""
    if not runs:
        return runs
    median_w = float(np.median([r[1] - r[0] for r in runs]))
    limit = SPLIT_WIDTH_FACTOR * median_w
    out = []
    queue = [list(r) for r in runs]
    while queue:
        run = queue.pop(0)
        width = run[1] - run[0]
        if width <= limit or width < 2 * MIN_SEGMENT_WIDTH:
            out.append(run)
            continue
        third = max(width // 3, 1)
        lo = run[0] + third
        hi = run[1] - third
        cut = lo + int(np.argmin(profile[lo:hi])) if hi > lo else run[0] + width // 2
        queue.insert(0, [cut, run[1]])
        queue.insert(0, [run[0], cut])
    out.sort(key=lambda r: r[0])
    return out


def segment_characters(bin_plate: BinaryRaster) -> list[SegmentBox]:
    """Character cells from the vertical projection profile, x-sorted and
    pairwise disjoint; each cell's rows are tightened to its ink extent."""
    ink = bin_plate.ink
    profile = ink.sum(axis=0)
    runs = _column_runs(profile)
    runs = _merge_or_drop_narrow(runs)
    runs = _split_wide(runs, profile)

    boxes = []
    for x0, x1 in runs:
        rows = np.nonzero(ink[:, x0:x1].any(axis=1))[0]
        if len(rows) == 0:
            continue
        boxes.append(SegmentBox(x0=int(x0), x1=int(x1), y0=int(rows[0]), y1=int(rows[-1]) + 1))
    return boxes


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def agreement_score(bitmap: np.ndarray, template: GlyphTemplate) -> float:
    """Fraction of the 384 canonical pixels on which bitmap and template agree."""
    return float((bitmap == template.bitmap).sum()) / (TEMPLATE_W * TEMPLATE_H)


def classify_glyph(bin_plate: BinaryRaster, box: SegmentBox,
                   templates: list[GlyphTemplate]) -> CharRead:
    """Score the box crop against every template; ties go to the
    lexicographically smallest class."""
    if not templates:
        raise ValueError("empty template set")
    crop = bin_plate.ink[box.y0:box.y1, box.x0:box.x1]
    bitmap = scale_bitmap_nn(crop, TEMPLATE_H, TEMPLATE_W)
    scored = sorted(
        ((t.glyph_class, agreement_score(bitmap, t)) for t in templates),
        key=lambda cs: (-cs[1], cs[0]),
    )
    best_class, best_score = scored[0]
    return CharRead(
        best=best_class,
        confidence=best_score,
        alternatives=[(c, s) for c, s in scored[1:]],
        box=box,
    )


def read_plate(plate: CanonicalPlate, templates: list[GlyphTemplate]) -> PlateRead:
    """binarize -> strip frame lines -> segment -> classify each glyph."""
    stripped = strip_frame_lines(binarize_plate(plate))
    boxes = segment_characters(stripped)
    return PlateRead(chars=[classify_glyph(stripped, b, templates) for b in boxes])
