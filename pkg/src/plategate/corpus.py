"""Deterministic synthetic plate corpus with exact ground truth.

Frames are 640x480 grayscale: a light, mildly sloped background with one
rendered plate face (dark glyphs on a light strip, exact 5:1 aspect) at a
randomized position, optionally rotated, noised, brightness-shifted,
railed, or with one fused glyph pair. All randomness flows through the
seedable generator in `rng`, so a (seed, n) pair reproduces identical
bytes anywhere. The manifest is line-delimited JSON, one record per
frame, with the true string and geometry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .glyphs import font_bitmap, scale_bitmap_nn, tight_bitmap
from .imgio import save_bmp, save_pgm
from .locate import CANONICAL_H, CANONICAL_W
from .raster import GrayRaster
from .rng import SplitMix64, derive_seed

FRAME_W, FRAME_H = 640, 480
PLATE_ASPECT = 5                      # face width = 5 x height, matching canonical 240x48

PLATE_BG = 225
PLATE_INK = 25
BG_BASE_RANGE = (180, 205)            # near the face level: thresholding then splits
                                      # ink from everything light even when a crop
                                      # carries wide background margins
BG_SLOPE_MAX = 12.0                   # max brightness drift across the frame, per axis

# Face layout in canonical units (height 48): eight glyph cells.
SIDE_PAD = 12
GLYPH_W = 20
GLYPH_GAP = 8
GLYPH_H = 32
GLYPH_Y = 8
PLATE_LEN = 8

RAIL_THICKNESS = 2                    # optional side rails, canonical units
BRIDGE_THICKNESS = 3

SKEW_MAX_DEG = 8.0
NOISE_SIGMAS = (0.0, 8.0, 16.0)
BRIGHTNESS_MAX = 30
RAILS_FRACTION = 0.25
HEIGHT_RANGE = (44, 64)
PLACEMENT_MARGIN = 16

CANON_GLYPH_BOXES = tuple(
    (SIDE_PAD + k * (GLYPH_W + GLYPH_GAP), GLYPH_Y,
     SIDE_PAD + k * (GLYPH_W + GLYPH_GAP) + GLYPH_W, GLYPH_Y + GLYPH_H)
    for k in range(PLATE_LEN)
)

_DIGITS = "0123456789"
_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
_POSITION_POOLS = (_DIGITS, _DIGITS, _LETTERS, _DIGITS, _DIGITS, _DIGITS, _DIGITS, _DIGITS)


# ---------------------------------------------------------------------------
# Frame specification and truth
# ---------------------------------------------------------------------------

@dataclass
class FrameSpec:
    """Everything needed to render one frame, reproducibly."""

    plate: str
    height_px: int = CANONICAL_H
    center: tuple[float, float] = (FRAME_W / 2, FRAME_H / 2)
    skew_deg: float = 0.0
    noise_sigma: float = 0.0
    brightness_shift: int = 0
    rails: bool = False
    fused_pair: int | None = None     # bridge glyph k with k+1
    background: int = 168
    bg_slope: tuple[float, float] = (0.0, 0.0)
    noise_seed: int = 0

    @property
    def width_px(self) -> int:
        return PLATE_ASPECT * self.height_px

    @property
    def tags(self) -> list[str]:
        out = []
        if self.skew_deg != 0.0:
            out.append("skew")
        if self.noise_sigma > 0.0:
            out.append("noise")
        if self.brightness_shift != 0:
            out.append("bright")
        if self.rails:
            out.append("rails")
        if self.fused_pair is not None:
            out.append("fused")
        return out


@dataclass
class RenderedFrame:
    """Ground-truth geometry of a rendered frame."""

    image: GrayRaster
    box: tuple[int, int, int, int]            # painted-face bounds, half-open
    quad: list[list[float]]                   # face corners TL TR BR BL in frame coords
    glyph_boxes: list[tuple[int, int, int, int]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _scale(value: float, height_px: int) -> int:
    return int(math.floor(value * height_px / CANONICAL_H + 0.5))


def render_face(plate: str, height_px: int, rails: bool = False,
                fused_pair: int | None = None) -> tuple[np.ndarray, list[tuple[int, int, int, int]]]:
    """The flat plate strip (uint8) plus its glyph boxes in face pixels."""
    if len(plate) != PLATE_LEN:
        raise ValueError(f"face renderer expects {PLATE_LEN} glyphs, got {len(plate)}")
    w_px = PLATE_ASPECT * height_px
    face = np.full((height_px, w_px), PLATE_BG, dtype=np.uint8)

    boxes = []
    for k, ch in enumerate(plate):
        cx0, cy0, cx1, cy1 = CANON_GLYPH_BOXES[k]
        x0, y0 = _scale(cx0, height_px), _scale(cy0, height_px)
        x1, y1 = _scale(cx1, height_px), _scale(cy1, height_px)
        bitmap = scale_bitmap_nn(font_bitmap(ch), y1 - y0, x1 - x0)
        cell = face[y0:y1, x0:x1]
        cell[bitmap] = PLATE_INK
        boxes.append((x0, y0, x1, y1))

    if fused_pair is not None:
        if not 0 <= fused_pair < PLATE_LEN - 1:
            raise ValueError(f"fused_pair must join two of {PLATE_LEN} glyphs")
        left, right = boxes[fused_pair], boxes[fused_pair + 1]
        mid = (left[1] + left[3]) // 2
        t = max(BRIDGE_THICKNESS, _scale(BRIDGE_THICKNESS, height_px))
        face[mid - t // 2: mid - t // 2 + t, left[2] - 1:right[0] + 1] = PLATE_INK

    if rails:
        t = max(RAIL_THICKNESS, _scale(RAIL_THICKNESS, height_px))
        face[:, :t] = PLATE_INK
        face[:, -t:] = PLATE_INK
    return face, boxes


def _rotate_points(points: np.ndarray, center_xy: tuple[float, float],
                   face_size: tuple[int, int], theta: float) -> np.ndarray:
    """Map face coords to frame coords: rotate about the face centre, then
    translate. Positive angles tip the text downward to the right."""
    w, h = face_size
    c, s = math.cos(theta), math.sin(theta)
    px = points[:, 0] - w / 2.0
    py = points[:, 1] - h / 2.0
    return np.stack([
        center_xy[0] + c * px - s * py,
        center_xy[1] + s * px + c * py,
    ], axis=1)


def render_frame(spec: FrameSpec) -> RenderedFrame:
    """Render the full 640x480 frame a camera would hand the pipeline."""
    face, face_boxes = render_face(spec.plate, spec.height_px, spec.rails, spec.fused_pair)
    h_px, w_px = face.shape
    theta = math.radians(spec.skew_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cx, cy = spec.center

    xs = np.arange(FRAME_W, dtype=np.float64)
    ys = np.arange(FRAME_H, dtype=np.float64)
    frame = (float(spec.background)
             + spec.bg_slope[0] * (xs[None, :] / (FRAME_W - 1))
             + spec.bg_slope[1] * (ys[:, None] / (FRAME_H - 1)))

    # paint the rotated face with nearest-neighbour inverse sampling
    half_w = (w_px * abs(cos_t) + h_px * abs(sin_t)) / 2.0
    half_h = (w_px * abs(sin_t) + h_px * abs(cos_t)) / 2.0
    x_lo = max(int(math.floor(cx - half_w)) - 1, 0)
    x_hi = min(int(math.ceil(cx + half_w)) + 2, FRAME_W)
    y_lo = max(int(math.floor(cy - half_h)) - 1, 0)
    y_hi = min(int(math.ceil(cy + half_h)) + 2, FRAME_H)

    yy, xx = np.mgrid[y_lo:y_hi, x_lo:x_hi]
    dx = xx - cx
    dy = yy - cy
    u = cos_t * dx + sin_t * dy + w_px / 2.0
    v = -sin_t * dx + cos_t * dy + h_px / 2.0
    j = np.floor(u).astype(np.int64)
    i = np.floor(v).astype(np.int64)
    inside = (j >= 0) & (j < w_px) & (i >= 0) & (i < h_px)
    sub = frame[y_lo:y_hi, x_lo:x_hi]
    sub[inside] = face[i[inside], j[inside]].astype(np.float64)

    frame += float(spec.brightness_shift)
    if spec.noise_sigma > 0.0:
        noise = SplitMix64(spec.noise_seed).block_gaussian(FRAME_H * FRAME_W)
        frame += spec.noise_sigma * noise.reshape(FRAME_H, FRAME_W)
    pixels = np.clip(np.floor(frame + 0.5), 0, 255).astype(np.uint8)

    iy, ix = np.nonzero(inside)
    box = (x_lo + int(ix.min()), y_lo + int(iy.min()),
           x_lo + int(ix.max()) + 1, y_lo + int(iy.max()) + 1)
    corners = np.array([[0, 0], [w_px, 0], [w_px, h_px], [0, h_px]], dtype=np.float64)
    quad = _rotate_points(corners, (cx, cy), (w_px, h_px), theta)

    glyph_boxes = []
    for x0, y0, x1, y1 in face_boxes:
        pts = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)
        rot = _rotate_points(pts, (cx, cy), (w_px, h_px), theta)
        glyph_boxes.append((int(math.floor(rot[:, 0].min())), int(math.floor(rot[:, 1].min())),
                            int(math.ceil(rot[:, 0].max())), int(math.ceil(rot[:, 1].max()))))

    return RenderedFrame(image=GrayRaster(pixels), box=box,
                         quad=[[float(x), float(y)] for x, y in quad],
                         glyph_boxes=glyph_boxes)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def random_plate(stream: SplitMix64) -> str:
    """A string matching the default grammar: DD L DDDDD."""
    return "".join(stream.choice(pool) for pool in _POSITION_POOLS)


def sample_spec(stream: SplitMix64, *, perturb: bool, fused: bool = False) -> FrameSpec:
    """Draw one frame's parameters; draw order is part of the format."""
    plate = random_plate(stream)
    height = HEIGHT_RANGE[0] + stream.randint(HEIGHT_RANGE[1] - HEIGHT_RANGE[0] + 1)
    if perturb:
        skew = stream.uniform_range(-SKEW_MAX_DEG, SKEW_MAX_DEG)
        sigma = stream.choice(NOISE_SIGMAS)
        shift = stream.randint(2 * BRIGHTNESS_MAX + 1) - BRIGHTNESS_MAX
        rails = stream.uniform() < RAILS_FRACTION
    else:
        skew, sigma, shift, rails = 0.0, 0.0, 0, False

    background = BG_BASE_RANGE[0] + stream.randint(BG_BASE_RANGE[1] - BG_BASE_RANGE[0] + 1)
    slope = (stream.uniform_range(-BG_SLOPE_MAX, BG_SLOPE_MAX),
             stream.uniform_range(-BG_SLOPE_MAX, BG_SLOPE_MAX))

    w_px, h_px = PLATE_ASPECT * height, height
    theta = math.radians(skew)
    half_w = (w_px * abs(math.cos(theta)) + h_px * abs(math.sin(theta))) / 2.0
    half_h = (w_px * abs(math.sin(theta)) + h_px * abs(math.cos(theta))) / 2.0
    x_span = FRAME_W - 2 * PLACEMENT_MARGIN - int(math.ceil(2 * half_w))
    y_span = FRAME_H - 2 * PLACEMENT_MARGIN - int(math.ceil(2 * half_h))
    cx = PLACEMENT_MARGIN + stream.randint(max(x_span, 1)) + half_w
    cy = PLACEMENT_MARGIN + stream.randint(max(y_span, 1)) + half_h

    noise_seed = stream.next_u64()
    return FrameSpec(
        plate=plate, height_px=height, center=(cx, cy), skew_deg=skew,
        noise_sigma=sigma, brightness_shift=shift, rails=rails,
        fused_pair=3 if fused else None, background=background,
        bg_slope=slope, noise_seed=noise_seed,
    )


# ---------------------------------------------------------------------------
# Corpus generation and manifests
# ---------------------------------------------------------------------------

def generate_corpus(out_dir: str | Path, n: int, seed: int, *,
                    perturb: bool = False, manifest_name: str = "corpus.jsonl") -> Path:
    """Render n frames plus manifest into out_dir; returns the manifest path.

    Every frame is written twice (binary PGM and 24-bit BMP); the primary
    `file` field alternates between the two so downstream consumers
    exercise both decoders. In a perturbed run, the middle frame carries
    the fused-glyph variant.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for index in range(n):
        frame_seed = derive_seed(seed, index)
        stream = SplitMix64(frame_seed)
        fused = perturb and index == n // 2
        spec = sample_spec(stream, perturb=perturb, fused=fused)
        rendered = render_frame(spec)

        base = f"frame_{index:04d}"
        save_pgm(out / f"{base}.pgm", rendered.image)
        save_bmp(out / f"{base}.bmp", rendered.image)

        lines.append(json.dumps({
            "index": index,
            "file": f"{base}.pgm" if index % 2 == 0 else f"{base}.bmp",
            "file_pgm": f"{base}.pgm",
            "file_bmp": f"{base}.bmp",
            "plate": spec.plate,
            "box": list(rendered.box),
            "quad": rendered.quad,
            "glyph_boxes": [list(b) for b in rendered.glyph_boxes],
            "plate_height_px": spec.height_px,
            "skew_deg": spec.skew_deg,
            "noise_sigma": spec.noise_sigma,
            "brightness_shift": spec.brightness_shift,
            "tags": spec.tags,
            "seed": frame_seed,
        }))
    manifest = out / manifest_name
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def load_manifest(path: str | Path) -> list[dict]:
    """Parse a line-delimited JSON manifest and check the files exist."""
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: bad manifest record: {exc}") from exc
            rec["file"] = str(path.parent / rec["file"])
            if not Path(rec["file"]).is_file():
                raise FileNotFoundError(f"{path}:{line_no}: missing image {rec['file']}")
            records.append(rec)
    return records
