"""Retinal image loading and preprocessing.

Images are plain ``numpy`` arrays of shape ``(h, w, 3)`` and dtype ``uint8``.
Masks are boolean arrays of shape ``(h, w)`` where ``True`` marks an
informative (non-black) retina pixel.  Every function here is pure: inputs
are never modified in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "CropRegion",
    "ImageLoadError",
    "RetinaNotDetected",
    "ToneMapParams",
    "as_rgb",
    "compute_retina_mask",
    "crop_retina",
    "load_image",
    "resize",
    "rotate",
    "rotate_augment",
    "tone_map",
    "tone_map_values",
]

TONE_OPERATORS = ("linear", "logarithmic", "exponential")
TONE_MODES = ("per_channel", "luminance")


class ImageLoadError(ValueError):
    """Raised when a file cannot be decoded into an RGB raster."""


class RetinaNotDetected(ValueError):
    """Raised when the crop search finds no retina above the image center."""


def as_rgb(image) -> np.ndarray:
    """Validate and return ``image`` as a ``(h, w, 3)`` uint8 array."""
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must have at least one pixel")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def load_image(path) -> np.ndarray:
    """Decode a PNG or JPEG file into an 8-bit RGB raster.

    Alpha is dropped and grayscale is replicated across the three channels.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG", "MPO"):
                raise ImageLoadError(f"{path}: unsupported encoding {im.format!r}")
            im.load()
            if im.width == 0 or im.height == 0:
                raise ImageLoadError(f"{path}: zero-dimension image")
            if im.mode in ("L", "LA", "I", "I;16", "I;16B", "F", "1"):
                gray = np.asarray(im.convert("L"), dtype=np.uint8)
                return np.repeat(gray[:, :, None], 3, axis=2)
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except ImageLoadError:
        raise
    except (OSError, UnidentifiedImageError, SyntaxError, ValueError) as exc:
        raise ImageLoadError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class CropRegion:
    """Geometry of a retina crop, in 1-based inclusive pixel indices."""

    center_row: int
    center_col: int
    top_offset: int
    radius: int
    bounds: tuple[int, int, int, int]  # (x1, x2, y1, y2): rows x1..x2, cols y1..y2

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    def slices(self) -> tuple[slice, slice]:
        x1, x2, y1, y2 = self.bounds
        return slice(x1 - 1, x2), slice(y1 - 1, y2)


def _non_black(pixels: np.ndarray, threshold: int) -> np.ndarray:
    return np.any(pixels > threshold, axis=-1)


def crop_retina(image, threshold: int = 0) -> tuple[np.ndarray, CropRegion]:
    """Cut the square region around the retina.

    Scans the center column downward from the top row until the first
    non-black pixel; the distance from there to the center row is the retina
    radius.  The radius is clamped so the square stays inside the image.
    """
    img = as_rgb(image)
    h, w = img.shape[:2]
    c_h, c_w = h // 2, w // 2
    if c_h < 1 or c_w < 1:
        raise RetinaNotDetected(f"image of size {h}x{w} is too small to crop")

    column = _non_black(img[:c_h, c_w - 1], threshold)
    hits = np.flatnonzero(column)
    if hits.size == 0:
        raise RetinaNotDetected("center column above the image center is entirely black")
    p = int(hits[0]) + 1
    radius = min(c_h - p, c_w - 1, c_h - 1)

    bounds = (c_h - radius, c_h + radius, c_w - radius, c_w + radius)
    region = CropRegion(c_h, c_w, p, radius, bounds)
    rows, cols = region.slices()
    return img[rows, cols].copy(), region


def resize(image, side: int = 512, method: str = "nearest") -> np.ndarray:
    """Resample ``image`` to ``side x side`` pixels.

    ``nearest`` never creates new intensity values, which keeps exact black
    borders exact.  ``bilinear`` uses pixel-center alignment and rounds to
    the nearest integer.
    """
    img = as_rgb(image)
    if side < 2:
        raise ValueError(f"side must be >= 2, got {side}")
    h, w = img.shape[:2]
    if method == "nearest":
        rows = np.minimum(((np.arange(side) + 0.5) * h / side).astype(np.int64), h - 1)
        cols = np.minimum(((np.arange(side) + 0.5) * w / side).astype(np.int64), w - 1)
        return img[rows[:, None], cols[None, :]]
    if method == "bilinear":
        return _bilinear(img, side)
    raise ValueError(f"unknown resize method {method!r}")


def _axis_weights(n_src: int, n_dst: int):
    pos = np.clip((np.arange(n_dst) + 0.5) * n_src / n_dst - 0.5, 0, n_src - 1)
    lo = np.floor(pos).astype(np.int64)
    hi = np.minimum(lo + 1, n_src - 1)
    return lo, hi, pos - lo


def _bilinear(img: np.ndarray, side: int) -> np.ndarray:
    h, w = img.shape[:2]
    r0, r1, fr = _axis_weights(h, side)
    c0, c1, fc = _axis_weights(w, side)
    src = img.astype(np.float64)
    top = src[r0][:, c0] * (1 - fc)[None, :, None] + src[r0][:, c1] * fc[None, :, None]
    bot = src[r1][:, c0] * (1 - fc)[None, :, None] + src[r1][:, c1] * fc[None, :, None]
    out = top * (1 - fr)[:, None, None] + bot * fr[:, None, None]
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


_ROTATIONS = {90: -1, 180: 2, 270: 1}  # clockwise degrees -> np.rot90 k


def rotate(image: np.ndarray, angle: int) -> np.ndarray:
    """Rotate clockwise by a right angle. Works on rasters and masks."""
    if angle not in _ROTATIONS:
        raise ValueError(f"angle must be one of 90, 180, 270, got {angle}")
    return np.ascontiguousarray(np.rot90(image, k=_ROTATIONS[angle], axes=(0, 1)))


def rotate_augment(image, angles=(90, 180, 270)) -> list[np.ndarray]:
    """Return one clockwise-rotated copy of a square image per angle."""
    img = as_rgb(image)
    if img.shape[0] != img.shape[1]:
        raise ValueError(f"rotation augmentation needs a square image, got {img.shape[:2]}")
    angles = list(angles)
    if not angles:
        raise ValueError("at least one angle is required")
    if len(set(angles)) != len(angles):
        raise ValueError(f"duplicate angles in {angles}")
    return [rotate(img, a) for a in angles]


def compute_retina_mask(image, threshold: int = 0) -> np.ndarray:
    """Flag pixels with at least one channel above ``threshold``."""
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must lie in [0, 255]")
    return _non_black(as_rgb(image), threshold)


@dataclass(frozen=True)
class ToneMapParams:
    """Global tone-mapping operator and its constants.

    ``linear`` scales by ``e``; ``logarithmic`` computes
    ``log10(1 + q*H) / log10(1 + k*max(H))``; ``exponential`` computes
    ``1 - exp(-H / (k*mean(H)))``.  ``luminance`` mode maps the mean of the
    three channels and rebuilds color with the per-pixel ratio raised to ``s``.
    """

    operator: str = "exponential"
    e: float = 1.0
    q: float = 10.0
    k: float = 1.0
    mode: str = "per_channel"
    s: float = 1.0

    def __post_init__(self):
        if self.operator not in TONE_OPERATORS:
            raise ValueError(f"unknown tone-map operator {self.operator!r}")
        if self.mode not in TONE_MODES:
            raise ValueError(f"unknown tone-map mode {self.mode!r}")
        if self.operator == "linear" and not self.e > 0:
            raise ValueError("linear scale factor e must be > 0")
        if self.operator == "logarithmic" and not (self.q > 1 and self.k > 0):
            raise ValueError("logarithmic mapping needs q > 1 and k > 0")
        if self.operator == "exponential" and not self.k > 0:
            raise ValueError("exponential constant k must be > 0")
        if self.mode == "luminance" and not 0 < self.s <= 1:
            raise ValueError("saturation s must lie in (0, 1]")


def _apply_operator(raw: np.ndarray, stats_of: np.ndarray, params: ToneMapParams, scale: float) -> np.ndarray:
    # raw / scale is the intensity H; stats_of holds the masked raw values used for max/mean
    if params.operator == "linear":
        return params.e * (raw / scale)
    if params.operator == "logarithmic":
        peak = float(stats_of.max()) / scale
        if peak == 0.0:
            return np.zeros_like(raw)
        return np.log10(1.0 + params.q * (raw / scale)) / math.log10(1.0 + params.k * peak)
    # H / mean(H) == raw * n / sum(raw); integer inputs keep both factors exact,
    # which makes the result invariant to integer rescaling of the image
    total = math.fsum(stats_of.ravel().tolist())
    if total == 0.0:
        return np.zeros_like(raw)
    return 1.0 - np.exp(-(raw * float(stats_of.size) / total) / params.k)


def tone_map_values(values: np.ndarray, mask: np.ndarray, params: ToneMapParams,
                    scale: float = 1.0) -> np.ndarray:
    """Tone-map intensities ``values / scale`` in [0, 1]; returns L_d clamped to [0, 1].

    ``values`` has shape ``(h, w, 3)``.  Statistics come from masked pixels
    only.  Unmasked entries of the result are meaningless to callers.
    """
    raw = np.asarray(values, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != raw.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match image {raw.shape[:2]}")
    if not mask.any():
        raise ValueError("tone mapping needs at least one masked pixel")

    if params.mode == "per_channel":
        out = np.empty_like(raw)
        for c in range(3):
            out[:, :, c] = _apply_operator(raw[:, :, c], raw[:, :, c][mask], params, scale)
        return np.clip(out, 0.0, 1.0)

    # luminance is the channel mean; the channel sum keeps integer inputs exact
    lum3 = raw.sum(axis=2)
    ld = np.clip(_apply_operator(lum3, lum3[mask], params, 3.0 * scale), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lum3[:, :, None] > 0, 3.0 * raw / lum3[:, :, None], 0.0)
    return np.clip(ld[:, :, None] * ratio ** params.s, 0.0, 1.0)


def tone_map(image, mask, params: ToneMapParams | None = None) -> np.ndarray:
    """Apply a global tone-mapping operator to the masked pixels of ``image``.

    Masked-out pixels are copied through unchanged.
    """
    params = params or ToneMapParams()
    img = as_rgb(image)
    mask = np.asarray(mask, dtype=bool)
    ld = tone_map_values(img, mask, params, scale=255.0)
    mapped = np.rint(ld * 255.0).astype(np.uint8)
    return np.where(mask[:, :, None], mapped, img)
