"""Glyph templates for template-matching OCR.

The default template set is rendered from a built-in 5x7 dot-matrix font
(digits 0-9 and letters A-Z) scaled to the canonical 16x24 glyph size with
nearest-neighbour sampling. The same bitmaps drive the synthetic corpus
renderer, so recognition accuracy figures are in-distribution by design.

Archive format (single text file or every *.txt in a directory):

    class=<char> rows=24 cols=16
    ...24 lines of 16 characters, '#' = ink, '.' = background...
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TEMPLATE_W = 16
TEMPLATE_H = 24

# 5x7 dot-matrix strokes, one string of 7 rows x 5 cols per glyph.
# Digit bitmaps are row-balanced: the ink centroid of every digit sits on
# the middle row (sum of (row-3)*bits_in_row is 0 or +/-1). Skew is
# estimated from ink moments, and digits at the plate's outer positions
# would otherwise tilt the estimate on a perfectly level plate.
# Interior column boundaries always share ink with a neighbour on some row
# (no 1-px-wide diagonal staircases): nearest-neighbour resampling of a
# slightly rotated plate can otherwise produce an all-background column in
# the middle of a glyph, which the projection segmenter reads as a gap.
FONT_5X7: dict[str, tuple[str, ...]] = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": (".##..", ".##..", ".##..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "##.##", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "....#", "...#.", "..##.", "...##", "#...#", ".####"),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("####.", "#....", "####.", "....#", "...##", "#...#", "####."),
    "6": (".###.", "##...", "##...", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...##", ".###.", ".##..", "##...", "####."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "...##", "..##.", "###.."),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "##..#", "##..#", "##..#", "##..#", "##..#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#..##", "#.##.", "###..", "##...", "###..", "#.##.", "#..##"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#####", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "###.#", "#.###", "#..##", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("##.##", "##.##", "##.##", ".#.#.", ".###.", ".###.", "..#.."),
    "W": ("#...#", "#...#", "#.#.#", "#.#.#", "#####", "##.##", "#...#"),
    "X": ("##.##", "##.##", ".###.", ".###.", ".###.", "##.##", "##.##"),
    "Y": ("##.##", "##.##", ".###.", "..#..", "..#..", "..#..", ".###."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}

GLYPH_CLASSES = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class TemplateArchiveError(ValueError):
    """Malformed template archive."""


@dataclass
class GlyphTemplate:
    """One character class and its canonical 16x24 ink bitmap."""

    glyph_class: str
    bitmap: np.ndarray  # bool, shape (24, 16)

    def __post_init__(self):
        b = np.asarray(self.bitmap, dtype=bool)
        if b.shape != (TEMPLATE_H, TEMPLATE_W):
            raise ValueError(f"template bitmap must be {TEMPLATE_H}x{TEMPLATE_W}, got {b.shape}")
        if len(self.glyph_class) != 1:
            raise ValueError("glyph_class must be a single character")
        self.bitmap = b


def scale_bitmap_nn(bitmap: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Nearest-neighbour scale of a boolean bitmap (pixel-centre sampling)."""
    src = np.asarray(bitmap, dtype=bool)
    h, w = src.shape
    rows = np.minimum((((np.arange(out_h) + 0.5) * h) // out_h).astype(int), h - 1)
    cols = np.minimum((((np.arange(out_w) + 0.5) * w) // out_w).astype(int), w - 1)
    return src[np.ix_(rows, cols)]


def font_bitmap(glyph_class: str) -> np.ndarray:
    """The raw 7x5 boolean bitmap of a built-in glyph."""
    rows = FONT_5X7[glyph_class]
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


def tight_bitmap(bitmap: np.ndarray) -> np.ndarray:
    """Crop a bitmap to its occupied rows and columns."""
    rows = np.nonzero(bitmap.any(axis=1))[0]
    cols = np.nonzero(bitmap.any(axis=0))[0]
    if len(rows) == 0:
        return bitmap
    return bitmap[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]


def default_templates() -> list[GlyphTemplate]:
    """All 36 built-in glyphs, tight-cropped then scaled to 16x24.

    Tight cropping matters: segmentation boxes hug the ink, so templates
    must be normalized the same way or narrow glyphs ('1', 'I') would be
    compared against versions with padded margins.
    """
    return [
        GlyphTemplate(c, scale_bitmap_nn(tight_bitmap(font_bitmap(c)), TEMPLATE_H, TEMPLATE_W))
        for c in GLYPH_CLASSES
    ]


# ---------------------------------------------------------------------------
# Archive I/O
# ---------------------------------------------------------------------------

def dump_templates(templates: list[GlyphTemplate]) -> str:
    """Serialize templates to the text archive format."""
    parts = []
    for t in templates:
        parts.append(f"class={t.glyph_class} rows={TEMPLATE_H} cols={TEMPLATE_W}")
        for row in t.bitmap:
            parts.append("".join("#" if v else "." for v in row))
    return "\n".join(parts) + "\n"


def save_templates(path: str | os.PathLike, templates: list[GlyphTemplate] | None = None) -> None:
    """Write a template archive file (the default set when none given)."""
    Path(path).write_text(dump_templates(templates or default_templates()), encoding="utf-8")


def _parse_archive_text(text: str, origin: str) -> list[GlyphTemplate]:
    templates = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.startswith("class="):
            raise TemplateArchiveError(f"{origin}:{i + 1}: expected 'class=...' header, got {line!r}")
        fields = dict(item.split("=", 1) for item in line.split())
        try:
            cls = fields["class"]
            rows = int(fields["rows"])
            cols = int(fields["cols"])
        except (KeyError, ValueError) as exc:
            raise TemplateArchiveError(f"{origin}:{i + 1}: bad header: {exc}") from exc
        if rows != TEMPLATE_H or cols != TEMPLATE_W:
            raise TemplateArchiveError(
                f"{origin}:{i + 1}: templates must be {TEMPLATE_H}x{TEMPLATE_W}, got {rows}x{cols}")
        body = lines[i + 1:i + 1 + rows]
        if len(body) < rows:
            raise TemplateArchiveError(f"{origin}:{i + 1}: truncated bitmap for class {cls}")
        bitmap = np.zeros((rows, cols), dtype=bool)
        for r, brow in enumerate(body):
            brow = brow.rstrip()
            if len(brow) != cols or any(c not in "#." for c in brow):
                raise TemplateArchiveError(f"{origin}:{i + 2 + r}: bad bitmap row {brow!r}")
            bitmap[r] = [c == "#" for c in brow]
        templates.append(GlyphTemplate(cls, bitmap))
        i += 1 + rows
    return templates


def load_templates(path: str | os.PathLike) -> list[GlyphTemplate]:
    """Load a template archive from a file or from every *.txt in a directory."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"template archive not found: {p}")
    if p.is_dir():
        templates = []
        for child in sorted(p.glob("*.txt")):
            templates.extend(_parse_archive_text(child.read_text(encoding="utf-8"), str(child)))
    else:
        templates = _parse_archive_text(p.read_text(encoding="utf-8"), str(p))
    seen = set()
    for t in templates:
        if t.glyph_class in seen:
            raise TemplateArchiveError(f"duplicate template class {t.glyph_class!r}")
        seen.add(t.glyph_class)
    if not templates:
        raise TemplateArchiveError(f"no templates found in {p}")
    return templates
