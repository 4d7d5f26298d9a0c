"""Glyph font and template archive: geometry, uniqueness, round trips."""

from __future__ import annotations

import numpy as np
import pytest

from plategate.glyphs import (
    FONT_5X7,
    GLYPH_CLASSES,
    TEMPLATE_H,
    TEMPLATE_W,
    TemplateArchiveError,
    default_templates,
    dump_templates,
    font_bitmap,
    load_templates,
    save_templates,
    scale_bitmap_nn,
    tight_bitmap,
)


# ---------------------------------------------------------------------------
# font integrity
# ---------------------------------------------------------------------------

def test_font_covers_all_classes():
    assert set(FONT_5X7) == set(GLYPH_CLASSES)
    assert len(GLYPH_CLASSES) == 36
    for cls, rows in FONT_5X7.items():
        assert len(rows) == 7, cls
        assert all(len(r) == 5 for r in rows), cls
        assert all(set(r) <= {"#", "."} for r in rows), cls


def test_font_bitmaps_distinct():
    seen = {}
    for cls in GLYPH_CLASSES:
        key = tuple(FONT_5X7[cls])
        assert key not in seen, f"{cls} duplicates {seen.get(key)}"
        seen[key] = cls


def test_every_glyph_column_is_inked():
    # A glyph with an empty interior column would be cut in two by the
    # projection segmenter after resampling; the font may not contain one.
    for cls in GLYPH_CLASSES:
        bm = font_bitmap(cls)
        tight = tight_bitmap(bm)
        assert np.all(tight.sum(axis=0) > 0), cls


def test_adjacent_columns_share_an_inked_row():
    # Nearest-neighbour resampling of a rotated plate can sample "between"
    # two font columns on different rows. If two adjacent columns share no
    # inked row, that phase alignment yields a blank output column inside
    # the glyph and the segmenter splits it. Guard every interior boundary
    # whose two sides are both at least two columns wide.
    for cls in GLYPH_CLASSES:
        tight = tight_bitmap(font_bitmap(cls))
        cols = tight.shape[1]
        for x in range(1, cols):
            if x < 2 or cols - x < 2:
                continue  # one-column slivers get merged back, not split
            left, right = tight[:, x - 1], tight[:, x]
            assert np.any(left & right), f"{cls}: boundary {x} has no shared inked row"


def test_digit_ink_is_row_balanced():
    # Skew estimation recovers the plate angle from ink moments alone, so
    # the digit strokes must not be top- or bottom-heavy in aggregate.
    total = 0
    for cls in "0123456789":
        bm = font_bitmap(cls)
        rows = bm.sum(axis=1)
        total += sum((r - 3) * int(n) for r, n in enumerate(rows))
    assert abs(total) <= 10


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def test_scale_block_doubling():
    bm = np.array([[1, 0], [0, 1]], dtype=bool)
    out = scale_bitmap_nn(bm, 4, 4)
    expected = np.array([
        [1, 1, 0, 0],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, 1],
    ], dtype=bool)
    assert np.array_equal(out, expected)


def test_scale_identity():
    bm = np.array([[1, 0, 1], [0, 1, 0]], dtype=bool)
    assert np.array_equal(scale_bitmap_nn(bm, 2, 3), bm)


def test_tight_bitmap_crops_margins():
    bm = np.zeros((7, 5), dtype=bool)
    bm[2:5, 1:4] = True
    tight = tight_bitmap(bm)
    assert tight.shape == (3, 3)
    assert np.all(tight)


# ---------------------------------------------------------------------------
# default templates
# ---------------------------------------------------------------------------

def test_default_templates_shape_and_uniqueness():
    templates = default_templates()
    assert len(templates) == 36
    classes = [t.glyph_class for t in templates]
    assert sorted(classes) == sorted(GLYPH_CLASSES)
    for t in templates:
        assert t.bitmap.shape == (TEMPLATE_H, TEMPLATE_W)
        assert t.bitmap.dtype == bool
        assert t.bitmap.any(), t.glyph_class


def test_templates_pairwise_separated():
    # No two classes may agree on more than ~90% of pixels; closer pairs
    # would be inseparable under mild noise.
    templates = default_templates()
    n_px = TEMPLATE_W * TEMPLATE_H
    for i, a in enumerate(templates):
        for b in templates[i + 1:]:
            agreement = np.count_nonzero(a.bitmap == b.bitmap) / n_px
            assert agreement <= 0.95, (a.glyph_class, b.glyph_class, agreement)


# ---------------------------------------------------------------------------
# archive round trip
# ---------------------------------------------------------------------------

def test_archive_file_round_trip(tmp_path):
    path = tmp_path / "templates.txt"
    save_templates(path)
    loaded = load_templates(path)
    by_class = {t.glyph_class: t for t in loaded}
    for t in default_templates():
        assert np.array_equal(by_class[t.glyph_class].bitmap, t.bitmap)


def test_archive_directory_round_trip(tmp_path):
    originals = default_templates()[:5]
    for t in originals:
        (tmp_path / f"{t.glyph_class}.txt").write_text(dump_templates([t]), encoding="utf-8")
    loaded = load_templates(tmp_path)
    assert {t.glyph_class for t in loaded} == {t.glyph_class for t in originals}


def test_archive_rejects_wrong_dimensions(tmp_path):
    path = tmp_path / "bad.txt"
    text = dump_templates(default_templates()[:1])
    path.write_text(text.replace("rows=24", "rows=23", 1), encoding="utf-8")
    with pytest.raises(TemplateArchiveError):
        load_templates(path)


def test_archive_rejects_duplicate_class(tmp_path):
    path = tmp_path / "dup.txt"
    one = dump_templates(default_templates()[:1])
    path.write_text(one + one, encoding="utf-8")
    with pytest.raises(TemplateArchiveError):
        load_templates(path)


def test_archive_missing_path():
    with pytest.raises((TemplateArchiveError, OSError)):
        load_templates("/nonexistent/templates.txt")
