"""Pure raster primitives: color conversion, contrast, filtering, edges,
thresholding and affine resampling.

Conventions used throughout:
  - grayscale pixels are uint8 arrays of shape (h, w), row-major
  - all rounding is round-half-up (floor(x + 0.5)), never banker's rounding
  - window operations clamp to the edge, so output size equals input size
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class RasterTooSmall(ValueError):
    """Raster is below the minimum size an operation supports."""


class DegenerateQuad(ValueError):
    """Sampling quad has (near-)zero area."""


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer with .5 always going up."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


# ---------------------------------------------------------------------------
# Raster types
# ---------------------------------------------------------------------------

@dataclass
class ColorRaster:
    """Decoded RGB image: uint8 pixels of shape (h, w, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.uint8)
        if p.ndim != 3 or p.shape[2] != 3 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"expected (h, w, 3) pixels, got {p.shape}")
        self.pixels = p

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass
class GrayRaster:
    """Luminance image: uint8 pixels of shape (h, w)."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.uint8)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"expected (h, w) pixels, got {p.shape}")
        self.pixels = p

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass
class BinaryRaster:
    """Ink mask: bool pixels of shape (h, w), True = foreground ink."""

    ink: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.ink, dtype=bool)
        if p.ndim != 2:
            raise ValueError(f"expected (h, w) mask, got {p.shape}")
        self.ink = p

    @property
    def width(self) -> int:
        return self.ink.shape[1]

    @property
    def height(self) -> int:
        return self.ink.shape[0]


@dataclass
class GradientMap:
    """Sobel response: L1 magnitude |gx|+|gy| (int32) and angle in degrees."""

    magnitude: np.ndarray
    orientation: np.ndarray | None = field(default=None)

    @property
    def width(self) -> int:
        return self.magnitude.shape[1]

    @property
    def height(self) -> int:
        return self.magnitude.shape[0]


# ---------------------------------------------------------------------------
# Point and window operations
# ---------------------------------------------------------------------------

def to_grayscale(src: ColorRaster) -> GrayRaster:
    """0.299 R + 0.587 G + 0.114 B, rounded half-up."""
    rgb = src.pixels.astype(np.float64)
    luma = rgb[:, :, 0] * LUMA_WEIGHTS[0] + rgb[:, :, 1] * LUMA_WEIGHTS[1] + rgb[:, :, 2] * LUMA_WEIGHTS[2]
    return GrayRaster(np.clip(round_half_up(luma), 0, 255).astype(np.uint8))


def normalize_contrast(src: GrayRaster, low_pct: float = 1.0, high_pct: float = 99.0) -> GrayRaster:
    """Stretch the [low_pct, high_pct] percentile range to [0, 255].

    Percentiles use the 'lower' (floor-index) definition so integer inputs
    give integer tails. A flat percentile window returns the image unchanged.
    """
    if not 0 <= low_pct < high_pct <= 100:
        raise ValueError("need 0 <= low_pct < high_pct <= 100")
    v = src.pixels
    p_lo = int(np.percentile(v, low_pct, method="lower"))
    p_hi = int(np.percentile(v, high_pct, method="lower"))
    if p_lo == p_hi:
        return GrayRaster(v.copy())
    clipped = np.clip(v, p_lo, p_hi).astype(np.float64)
    out = round_half_up(255.0 * (clipped - p_lo) / (p_hi - p_lo))
    return GrayRaster(out.astype(np.uint8))


def median_filter(src: GrayRaster, radius: int) -> GrayRaster:
    """Median over the (2r+1)^2 window, edges replicated."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return GrayRaster(src.pixels.copy())
    v = np.pad(src.pixels, radius, mode="edge")
    h, w = src.pixels.shape
    k = 2 * radius + 1
    stack = np.empty((k * k, h, w), dtype=np.uint8)
    idx = 0
    for dy in range(k):
        for dx in range(k):
            stack[idx] = v[dy:dy + h, dx:dx + w]
            idx += 1
    return GrayRaster(np.median(stack, axis=0).astype(np.uint8))


def sobel_components(src: GrayRaster) -> tuple[np.ndarray, np.ndarray]:
    """(gx, gy) int32 responses of the 3x3 Sobel kernels, edges replicated.

    gx is positive for a left-to-right increase, gy for a top-to-bottom one.
    """
    if src.width < 3 or src.height < 3:
        raise RasterTooSmall(f"need at least 3x3, got {src.width}x{src.height}")
    p = np.pad(src.pixels.astype(np.int32), 1, mode="edge")
    h, w = src.pixels.shape
    tl = p[0:h, 0:w]
    tc = p[0:h, 1:w + 1]
    tr = p[0:h, 2:w + 2]
    ml = p[1:h + 1, 0:w]
    mr = p[1:h + 1, 2:w + 2]
    bl = p[2:h + 2, 0:w]
    bc = p[2:h + 2, 1:w + 1]
    br = p[2:h + 2, 2:w + 2]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return gx, gy


def sobel_edges(src: GrayRaster) -> GradientMap:
    """Gradient map with L1 magnitude and atan2(gy, gx) orientation in degrees."""
    gx, gy = sobel_components(src)
    magnitude = np.abs(gx) + np.abs(gy)
    orientation = np.degrees(np.arctan2(gy, gx))
    # atan2 yields (-180, 180]; fold the single +180 value to -180
    orientation[orientation == 180.0] = -180.0
    return GradientMap(magnitude.astype(np.int32), orientation.astype(np.float32))


# ---------------------------------------------------------------------------
# Thresholding
# ---------------------------------------------------------------------------

def otsu_threshold(src: GrayRaster | np.ndarray) -> int:
    """Threshold t maximizing between-class variance of the 256-bin histogram.

    The split convention is class0 = {v <= t}. Variances are compared in
    exact integer arithmetic so ties resolve deterministically to the
    smallest maximizing t.
    """
    pixels = src.pixels if isinstance(src, GrayRaster) else np.asarray(src)
    if pixels.size == 0:
        raise ValueError("empty raster")
    hist = np.bincount(pixels.ravel().astype(np.uint8), minlength=256)
    return otsu_from_histogram(hist.tolist())


def otsu_from_histogram(hist: list[int]) -> int:
    """Otsu on a raw 256-bin histogram; smallest maximizing threshold wins.

    Between-class variance w0*w1*(mu0-mu1)^2 equals
    (s0*w1 - s1*w0)^2 / (w0*w1); candidates are compared by cross
    multiplication in exact integers.
    """
    total = sum(hist)
    total_sum = sum(i * c for i, c in enumerate(hist))
    best_t = 0
    best_num = 0  # (s0*w1 - s1*w0)^2
    best_den = 1  # w0*w1
    w0 = 0
    s0 = 0
    for t in range(256):
        w0 += hist[t]
        s0 += t * hist[t]
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            continue
        s1 = total_sum - s0
        num = (s0 * w1 - s1 * w0) ** 2
        den = w0 * w1
        if num * best_den > best_num * den:
            best_num, best_den, best_t = num, den, t
    return best_t


def binarize(src: GrayRaster, t: int, ink_is_dark: bool) -> BinaryRaster:
    """Ink = (v <= t) for dark ink, (v > t) otherwise."""
    if not 0 <= t <= 255:
        raise ValueError("threshold out of [0, 255]")
    if ink_is_dark:
        return BinaryRaster(src.pixels <= t)
    return BinaryRaster(src.pixels > t)


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

def quad_area(quad: np.ndarray) -> float:
    """Shoelace area of a 4-corner polygon."""
    q = np.asarray(quad, dtype=np.float64)
    x, y = q[:, 0], q[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def warp_to_rect(src: GrayRaster, quad: np.ndarray, out_w: int, out_h: int) -> GrayRaster:
    """Resample the quad interior onto an out_w x out_h grid.

    Corners are pixel-centre coordinates ordered TL, TR, BR, BL. Output
    pixel (row i, col j) maps bilinearly into the quad; samples are
    bilinear with clamp-to-edge, rounded half-up.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be >= 1")
    q = np.asarray(quad, dtype=np.float64)
    if q.shape != (4, 2):
        raise ValueError("quad must be four (x, y) corners")
    if quad_area(q) < 1.0:
        raise DegenerateQuad(f"quad area {quad_area(q):.3f} px^2 < 1")

    u = np.full(out_w, 0.5) if out_w == 1 else np.arange(out_w) / (out_w - 1)
    v = np.full(out_h, 0.5) if out_h == 1 else np.arange(out_h) / (out_h - 1)
    tl, tr, br, bl = q
    top = tl[None, :] + u[:, None] * (tr - tl)[None, :]       # (out_w, 2)
    bottom = bl[None, :] + u[:, None] * (br - bl)[None, :]
    # (out_h, out_w) sample coordinates
    xs = top[None, :, 0] + v[:, None] * (bottom[:, 0] - top[:, 0])[None, :]
    ys = top[None, :, 1] + v[:, None] * (bottom[:, 1] - top[:, 1])[None, :]

    h, w = src.pixels.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0

    p = src.pixels.astype(np.float64)
    val = (p[y0, x0] * (1 - fx) * (1 - fy)
           + p[y0, x1] * fx * (1 - fy)
           + p[y1, x0] * (1 - fx) * fy
           + p[y1, x1] * fx * fy)
    return GrayRaster(np.clip(round_half_up(val), 0, 255).astype(np.uint8))
