"""Plate localization: find plate-shaped regions, estimate skew, resample
to the canonical 240x48 strip.

The localization cue is vertical-edge density: character strokes produce
strong |gx| responses, so a box-averaged |gx| map thresholded at
mean + k*stddev lights up exactly where text sits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .raster import GrayRaster, binarize, otsu_threshold, sobel_components, warp_to_rect

CANONICAL_W = 240
CANONICAL_H = 48

SKEW_LIMIT_DEG = 15.0

_EIGHT_CONN = np.ones((3, 3), dtype=int)


class FrameTooSmall(ValueError):
    """Frame below the 64x32 minimum for localization."""


class EmptyRegion(ValueError):
    """Candidate region has too little ink to estimate skew."""


@dataclass
class LocalizerParams:
    """Tunables for the edge-density localizer."""

    min_aspect: float = 2.0
    max_aspect: float = 7.0
    min_area_px: int = 600
    density_window: tuple[int, int] = (41, 13)  # (width, height), odd
    density_k: float = 1.5
    box_pad: tuple[int, int] = (10, 6)  # compensates the box filter's edge erosion

    def __post_init__(self):
        if not 0 < self.min_aspect < self.max_aspect:
            raise ValueError("need 0 < min_aspect < max_aspect")
        if self.min_area_px <= 0 or self.density_k <= 0:
            raise ValueError("min_area_px and density_k must be positive")
        if any(d < 1 or d % 2 == 0 for d in self.density_window):
            raise ValueError("density_window sides must be odd and >= 1")
        if any(p < 0 for p in self.box_pad):
            raise ValueError("box_pad must be non-negative")


@dataclass
class PlateCandidate:
    """A located plate region: corner quad, score and estimated rotation."""

    quad: np.ndarray  # (4, 2) float, TL TR BR BL, pixel-centre coords
    score: float
    skew_deg: float = 0.0

    def __post_init__(self):
        self.quad = np.asarray(self.quad, dtype=np.float64)

    @property
    def box(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) axis-aligned bounds of the quad."""
        xs, ys = self.quad[:, 0], self.quad[:, 1]
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


@dataclass
class CanonicalPlate:
    """The deskewed fixed-size plate strip every later stage consumes."""

    raster: GrayRaster
    source_quad: np.ndarray
    source_frame_id: str = ""

    def __post_init__(self):
        if (self.raster.width, self.raster.height) != (CANONICAL_W, CANONICAL_H):
            raise ValueError(f"canonical plate must be {CANONICAL_W}x{CANONICAL_H}")


# ---------------------------------------------------------------------------
# Localization
# ---------------------------------------------------------------------------

def box_average(values: np.ndarray, win_w: int, win_h: int) -> np.ndarray:
    """Mean over a win_w x win_h window, edges replicated."""
    rx, ry = win_w // 2, win_h // 2
    padded = np.pad(values.astype(np.float64), ((ry, ry), (rx, rx)), mode="edge")
    # summed-area table with a zero border for clean window differences
    sat = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1))
    np.cumsum(padded, axis=0, out=sat[1:, 1:])
    np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
    h, w = values.shape
    sums = (sat[win_h:win_h + h, win_w:win_w + w]
            - sat[0:h, win_w:win_w + w]
            - sat[win_h:win_h + h, 0:w]
            + sat[0:h, 0:w])
    return sums / float(win_w * win_h)


def _aspect_fit(aspect: float, params: LocalizerParams, peak: float = 4.5) -> float:
    """1 at the peak aspect, falling linearly to 0 at the filter bounds."""
    if aspect <= params.min_aspect or aspect >= params.max_aspect:
        return 0.0
    if aspect <= peak:
        return (aspect - params.min_aspect) / (peak - params.min_aspect)
    return (params.max_aspect - aspect) / (params.max_aspect - peak)


def locate_plates(frame: GrayRaster, params: LocalizerParams | None = None) -> list[PlateCandidate]:
    """All plate-shaped regions, best score first.

    Pipeline: |gx| of Sobel -> box average over density_window -> threshold
    at mean + k*stddev -> 8-connected components -> aspect/area filter.
    Score blends normalized in-box edge density (0.7) with aspect fit (0.3).
    """
    params = params or LocalizerParams()
    if frame.width < 64 or frame.height < 32:
        raise FrameTooSmall(f"frame {frame.width}x{frame.height} below 64x32 minimum")

    gx, _ = sobel_components(frame)
    density = box_average(np.abs(gx), *params.density_window)
    thr = density.mean() + params.density_k * density.std()
    mask = density > thr
    if not mask.any():
        return []
    dmax = float(density.max())

    labels, count = ndimage.label(mask, structure=_EIGHT_CONN)
    pad_x, pad_y = params.box_pad
    candidates = []
    for sl in ndimage.find_objects(labels):
        ry0, ry1 = sl[0].start, sl[0].stop - 1
        rx0, rx1 = sl[1].start, sl[1].stop - 1
        # grow the raw component box: the box filter erodes edge response
        x0, y0 = max(rx0 - pad_x, 0), max(ry0 - pad_y, 0)
        x1, y1 = min(rx1 + pad_x, frame.width - 1), min(ry1 + pad_y, frame.height - 1)
        bw, bh = x1 - x0 + 1, y1 - y0 + 1
        aspect = bw / bh
        if not (params.min_aspect <= aspect <= params.max_aspect):
            continue
        if bw * bh < params.min_area_px:
            continue
        mean_density = float(density[ry0:ry1 + 1, rx0:rx1 + 1].mean())
        score = 0.7 * (mean_density / dmax) + 0.3 * _aspect_fit(aspect, params)
        quad = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)
        candidates.append(PlateCandidate(quad=quad, score=min(max(score, 0.0), 1.0)))
    candidates.sort(key=lambda c: (-c.score, c.box[0], c.box[1]))
    return candidates


# ---------------------------------------------------------------------------
# Skew estimation and rectification
# ---------------------------------------------------------------------------

def estimate_skew(frame: GrayRaster, candidate: PlateCandidate) -> float:
    """Rotation of the text inside the candidate, degrees in [-15, +15].

    Positive angles mean the text slopes downward to the right. Computed
    from the central second moments of the Otsu dark-ink mask:
    0.5 * atan2(2*mu11, mu20 - mu02).
    """
    x0, y0, x1, y1 = candidate.box
    x0, y0 = max(int(math.floor(x0)), 0), max(int(math.floor(y0)), 0)
    x1, y1 = min(int(math.ceil(x1)), frame.width - 1), min(int(math.ceil(y1)), frame.height - 1)
    region = GrayRaster(frame.pixels[y0:y1 + 1, x0:x1 + 1])
    ink = binarize(region, otsu_threshold(region), ink_is_dark=True).ink
    ys, xs = np.nonzero(ink)
    if len(xs) < 10:
        raise EmptyRegion(f"only {len(xs)} ink pixels in candidate region")
    xf = xs - xs.mean()
    yf = ys - ys.mean()
    mu20 = float(np.dot(xf, xf))
    mu02 = float(np.dot(yf, yf))
    mu11 = float(np.dot(xf, yf))
    angle = 0.5 * math.degrees(math.atan2(2.0 * mu11, mu20 - mu02))
    return max(-SKEW_LIMIT_DEG, min(SKEW_LIMIT_DEG, angle))


def rotate_quad(quad: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate quad corners about their centroid; positive = counterclockwise
    in y-up convention (visually counterclockwise on screen)."""
    q = np.asarray(quad, dtype=np.float64)
    center = q.mean(axis=0)
    a = math.radians(angle_deg)
    # y-down pixel coords flip the sign of the sine terms
    rot = np.array([[math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]])
    return (q - center) @ rot.T + center


def rectify(frame: GrayRaster, candidate: PlateCandidate) -> CanonicalPlate:
    """Deskew and resample the candidate to the canonical 240x48 strip."""
    quad = rotate_quad(candidate.quad, -candidate.skew_deg)
    raster = warp_to_rect(frame, quad, CANONICAL_W, CANONICAL_H)
    return CanonicalPlate(raster=raster, source_quad=quad)
