"""Binarization polarity, frame-line removal, segmentation, template OCR."""

from __future__ import annotations

import numpy as np
import pytest

from plategate.corpus import CANON_GLYPH_BOXES, PLATE_INK, render_face
from plategate.glyphs import TEMPLATE_H, TEMPLATE_W, GlyphTemplate, default_templates
from plategate.locate import CanonicalPlate
from plategate.ocr import (
    CharRead,
    SegmentBox,
    agreement_score,
    binarize_plate,
    classify_glyph,
    read_plate,
    segment_characters,
    strip_frame_lines,
)
from plategate.raster import BinaryRaster, GrayRaster

_QUAD = np.array([[0, 0], [239, 0], [239, 47], [0, 47]], dtype=np.float64)


def _canon(pixels: np.ndarray) -> CanonicalPlate:
    return CanonicalPlate(raster=GrayRaster(pixels), source_quad=_QUAD, source_frame_id="t")


def _blank_ink() -> np.ndarray:
    return np.zeros((48, 240), dtype=bool)


# ---------------------------------------------------------------------------
# binarize_plate
# ---------------------------------------------------------------------------

def test_binarize_dark_ink_face():
    face, _ = render_face("12A34567", 48)
    out = binarize_plate(_canon(face))
    assert np.array_equal(out.ink, face == PLATE_INK)


def test_binarize_inverted_face_flips_polarity():
    face, _ = render_face("12A34567", 48)
    inverted = (255 - face.astype(np.int32)).astype(np.uint8)
    out = binarize_plate(_canon(inverted))
    # Ink must still land on the glyph pixels, now the bright ones.
    assert np.array_equal(out.ink, face == PLATE_INK)


def test_binarize_uniform_strip_is_empty():
    out = binarize_plate(_canon(np.full((48, 240), 128, dtype=np.uint8)))
    assert out.ink.sum() == 0


def test_binarize_mostly_dark_picks_sparse_polarity():
    pixels = np.full((48, 240), 20, dtype=np.uint8)
    pixels[:, :12] = 230  # exactly 5% bright
    out = binarize_plate(_canon(pixels))
    assert out.ink.mean() == pytest.approx(0.05)
    assert bool(out.ink[0, 0])


# ---------------------------------------------------------------------------
# strip_frame_lines
# ---------------------------------------------------------------------------

def test_strip_removes_solid_bars_keeps_blob():
    ink = _blank_ink()
    ink[0:2, :] = True
    ink[46:48, :] = True
    ink[20:30, 100:110] = True
    out = strip_frame_lines(BinaryRaster(ink))
    assert not out.ink[0:2].any() and not out.ink[46:48].any()
    assert out.ink[20:30, 100:110].all()
    assert out.ink.sum() == 100


def test_strip_removes_near_solid_row():
    ink = _blank_ink()
    ink[5, :210] = True  # 87.5% of the row
    assert strip_frame_lines(BinaryRaster(ink)).ink.sum() == 0


def test_strip_removes_elongated_border_component():
    ink = _blank_ink()
    ink[0:31, 0:2] = True  # tall thin bar on the left edge, touches two borders
    assert strip_frame_lines(BinaryRaster(ink)).ink.sum() == 0


def test_strip_keeps_compact_corner_blob():
    ink = _blank_ink()
    ink[0:8, 0:8] = True  # touches two borders but is not elongated
    assert strip_frame_lines(BinaryRaster(ink)).ink.sum() == 64


def test_strip_keeps_interior_line():
    ink = _blank_ink()
    ink[24, 50:114] = True  # elongated but away from every border
    assert strip_frame_lines(BinaryRaster(ink)).ink.sum() == 64


def test_strip_all_ink_clears_everything():
    assert strip_frame_lines(BinaryRaster(np.ones((48, 240), dtype=bool))).ink.sum() == 0


def test_strip_noop_on_plain_text():
    face, _ = render_face("98Z76543", 48)
    binary = binarize_plate(_canon(face))
    assert np.array_equal(strip_frame_lines(binary).ink, binary.ink)


def test_strip_removes_rendered_rails():
    face, _ = render_face("12A34567", 48, rails=True)
    plain, _ = render_face("12A34567", 48)
    out = strip_frame_lines(binarize_plate(_canon(face)))
    assert np.array_equal(out.ink, plain == PLATE_INK)


# ---------------------------------------------------------------------------
# segment_characters
# ---------------------------------------------------------------------------

def test_segment_blank_is_empty():
    assert segment_characters(BinaryRaster(_blank_ink())) == []


def test_segment_full_width_glyphs_match_cells():
    # 0 and 8 ink their full 5-column design cell, so runs equal the cells.
    face, truth = render_face("08080808", 48)
    boxes = segment_characters(BinaryRaster(face == PLATE_INK))
    assert [(b.x0, b.y0, b.x1, b.y1) for b in boxes] == list(truth)
    assert list(truth) == list(CANON_GLYPH_BOXES)


def test_segment_eight_characters_within_cells():
    face, truth = render_face("47K19263", 48)
    boxes = segment_characters(BinaryRaster(face == PLATE_INK))
    assert len(boxes) == 8
    for box, (cx0, cy0, cx1, cy1) in zip(boxes, truth):
        assert cx0 <= box.x0 < box.x1 <= cx1
        assert cy0 <= box.y0 < box.y1 <= cy1


def test_segment_merges_narrow_run_across_small_gap():
    ink = _blank_ink()
    ink[10:34, 20:24] = True   # 4 wide: below minimum width
    ink[10:34, 26:36] = True   # gap of 2 columns, then a full run
    boxes = segment_characters(BinaryRaster(ink))
    assert [(b.x0, b.x1) for b in boxes] == [(20, 36)]


def test_segment_drops_narrow_run_across_large_gap():
    ink = _blank_ink()
    ink[10:34, 20:24] = True   # 4 wide, nearest run 5 columns away
    ink[10:34, 29:39] = True
    boxes = segment_characters(BinaryRaster(ink))
    assert [(b.x0, b.x1) for b in boxes] == [(29, 39)]


def test_segment_splits_wide_run_at_weak_column():
    ink = _blank_ink()
    ink[5:29, 5:15] = True     # two normal-width runs fix the median at 10
    ink[5:29, 80:90] = True
    ink[5:29, 40:52] = True    # double character: two blocks joined by a
    ink[20:23, 52:54] = True   # thin 3-row bridge
    ink[5:29, 54:66] = True
    boxes = segment_characters(BinaryRaster(ink))
    assert [(b.x0, b.x1) for b in boxes] == [(5, 15), (40, 52), (52, 66), (80, 90)]


def test_segment_fused_pair_still_eight():
    face, _ = render_face("12A34567", 48, fused_pair=3)
    boxes = segment_characters(BinaryRaster(face == PLATE_INK))
    assert len(boxes) == 8


def test_segment_boxes_sorted_and_disjoint():
    for plate in ("12A34567", "98Z76543", "40W22831"):
        face, _ = render_face(plate, 48)
        boxes = segment_characters(BinaryRaster(face == PLATE_INK))
        for left, right in zip(boxes, boxes[1:]):
            assert left.x1 <= right.x0


def test_segment_box_rows_tight_to_ink():
    ink = _blank_ink()
    ink[12:20, 30:40] = True
    (box,) = segment_characters(BinaryRaster(ink))
    assert (box.y0, box.y1) == (12, 20)


def test_segment_box_bounds_validated():
    with pytest.raises(ValueError):
        SegmentBox(x0=10, x1=10, y0=0, y1=24)
    with pytest.raises(ValueError):
        SegmentBox(x0=0, x1=241, y0=0, y1=24)


# ---------------------------------------------------------------------------
# classify_glyph
# ---------------------------------------------------------------------------

def test_classify_every_template_self_matches(templates):
    for t in templates:
        ink = np.zeros((TEMPLATE_H, TEMPLATE_W * 2), dtype=bool)
        ink[:, :TEMPLATE_W] = t.bitmap
        box = SegmentBox(x0=0, x1=TEMPLATE_W, y0=0, y1=TEMPLATE_H)
        read = classify_glyph(BinaryRaster(ink), box, templates)
        assert read.best == t.glyph_class
        assert read.confidence == 1.0
        assert len(read.alternatives) == len(templates) - 1
        assert all(score < 1.0 for _, score in read.alternatives)


def test_classify_alternatives_sorted(templates):
    ink = np.zeros((TEMPLATE_H, TEMPLATE_W), dtype=bool)
    ink[:, :] = templates[0].bitmap
    read = classify_glyph(BinaryRaster(ink),
                          SegmentBox(x0=0, x1=TEMPLATE_W, y0=0, y1=TEMPLATE_H), templates)
    keys = [(-score, cls) for cls, score in read.alternatives]
    assert keys == sorted(keys)


def test_classify_tie_breaks_lexicographically():
    bitmap = np.zeros((TEMPLATE_H, TEMPLATE_W), dtype=bool)
    bitmap[4:20, 4:12] = True
    pair = [GlyphTemplate("B", bitmap.copy()), GlyphTemplate("A", bitmap.copy())]
    read = classify_glyph(BinaryRaster(bitmap),
                          SegmentBox(x0=0, x1=TEMPLATE_W, y0=0, y1=TEMPLATE_H), pair)
    assert read.best == "A"
    assert read.alternatives == [("B", 1.0)]


def test_classify_empty_templates_raises():
    ink = np.ones((TEMPLATE_H, TEMPLATE_W), dtype=bool)
    with pytest.raises(ValueError):
        classify_glyph(BinaryRaster(ink),
                       SegmentBox(x0=0, x1=TEMPLATE_W, y0=0, y1=TEMPLATE_H), [])


def test_agreement_complement_is_zero(templates):
    for t in templates[:5]:
        assert agreement_score(~t.bitmap, t) == 0.0
        assert agreement_score(t.bitmap.copy(), t) == 1.0


def test_agreement_counts_exact_pixels(templates):
    t = templates[0]
    noisy = t.bitmap.copy()
    noisy[0, 0] ^= True
    noisy[5, 7] ^= True
    assert agreement_score(noisy, t) == (TEMPLATE_W * TEMPLATE_H - 2) / (TEMPLATE_W * TEMPLATE_H)


def test_classify_noisy_eight_survives(templates):
    eight = next(t for t in templates if t.glyph_class == "8")
    rng = np.random.RandomState(7)
    flips = rng.choice(TEMPLATE_W * TEMPLATE_H, size=19, replace=False)  # ~5%
    noisy = eight.bitmap.copy()
    noisy.ravel()[flips] ^= True
    read = classify_glyph(BinaryRaster(noisy),
                          SegmentBox(x0=0, x1=TEMPLATE_W, y0=0, y1=TEMPLATE_H), templates)
    assert read.best == "8"
    assert read.confidence == (TEMPLATE_W * TEMPLATE_H - 19) / (TEMPLATE_W * TEMPLATE_H)
    # Independent rescoring: count agreements pixel by pixel for every class.
    for cls, score in [(read.best, read.confidence)] + read.alternatives:
        template = next(t for t in templates if t.glyph_class == cls)
        matches = sum(
            bool(noisy[r, c]) == bool(template.bitmap[r, c])
            for r in range(TEMPLATE_H) for c in range(TEMPLATE_W)
        )
        assert score == matches / (TEMPLATE_W * TEMPLATE_H)


def test_agreement_monotone_under_nested_flips(templates):
    t = templates[10]
    rng = np.random.RandomState(3)
    order = rng.permutation(TEMPLATE_W * TEMPLATE_H)
    prev = 1.0
    bitmap = t.bitmap.copy()
    for k in (5, 15, 40, 90):
        noisy = bitmap.copy()
        noisy.ravel()[order[:k]] ^= True
        score = agreement_score(noisy, t)
        assert score <= prev
        prev = score


# ---------------------------------------------------------------------------
# read_plate
# ---------------------------------------------------------------------------

def test_read_plate_clean_face(templates):
    face, _ = render_face("12A34567", 48)
    read = read_plate(_canon(face), templates)
    assert read.raw_string == "12A34567"
    assert read.plate_confidence >= 0.9
    assert [c.box.x0 for c in read.chars] == sorted(c.box.x0 for c in read.chars)


def test_read_plate_fused_face(templates):
    face, _ = render_face("12A34567", 48, fused_pair=3)
    read = read_plate(_canon(face), templates)
    assert read.raw_string == "12A34567"


def test_read_plate_blank(templates):
    read = read_plate(_canon(np.full((48, 240), 200, dtype=np.uint8)), templates)
    assert read.chars == []
    assert read.raw_string == ""
    assert read.plate_confidence == 0.0


def test_char_read_fields():
    box = SegmentBox(x0=0, x1=16, y0=0, y1=24)
    read = CharRead(best="A", confidence=0.9, alternatives=[("B", 0.5)], box=box)
    assert read.best == "A" and read.box.width == 16 and read.box.height == 24
