"""Pixel grids: PGM I/O, Otsu binarization, binary morphology, labeling, Sobel.

Images are ``RasterImage`` wrappers around ``(height, width)`` uint8 arrays.
Masks are plain ``(height, width)`` boolean arrays. Coordinates follow the
image convention throughout the package: ``x`` is the column (rightward),
``y`` is the row (downward), origin at the top-left.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DecodeError, DetectionError

__all__ = [
    "RasterImage",
    "LabelMap",
    "Threshold",
    "square_se",
    "read_pgm",
    "write_pgm",
    "otsu_level",
    "threshold_otsu",
    "erode",
    "dilate",
    "open_mask",
    "connected_components",
    "largest_component",
    "sobel_edges",
    "fill_holes",
]


@dataclass(frozen=True)
class RasterImage:
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image must be a non-empty 2-D grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True)
class LabelMap:
    labels: np.ndarray
    component_areas: dict[int, int] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.component_areas)

    def mask(self, label: int) -> np.ndarray:
        return self.labels == label


@dataclass(frozen=True)
class Threshold:
    mask: np.ndarray
    level: int | None
    degenerate: bool


def square_se(side: int = 3) -> np.ndarray:
    if side < 1 or side % 2 == 0:
        raise ValueError(f"structuring element side must be odd and positive, got {side}")
    return np.ones((side, side), dtype=bool)


def _check_se(se: np.ndarray) -> np.ndarray:
    se = np.asarray(se, dtype=bool)
    if se.ndim != 2 or se.shape[0] != se.shape[1] or se.shape[0] % 2 == 0:
        raise ValueError("structuring element must be a square grid with odd side")
    if not se.any():
        raise ValueError("structuring element has no set cells")
    return se


# -- PGM ---------------------------------------------------------------------

def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        # comments may sit between any two header tokens
        while True:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if data[pos : pos + 1] == b"#":
                nl = data.find(b"\n", pos)
                if nl < 0:
                    raise DecodeError("malformed PGM header: unterminated comment")
                pos = nl + 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise DecodeError("malformed PGM header: missing fields")
        tokens.append(data[start:pos])
    return tokens, pos


def _rescale(values: np.ndarray, maxval: int) -> np.ndarray:
    if maxval > 255:
        values = values.astype(np.int64) * 255 // maxval
    return values.astype(np.uint8)


def read_pgm(data: bytes) -> RasterImage:
    """Decode a binary (P5) or ASCII (P2) PGM byte string."""
    if len(data) < 2:
        raise DecodeError("not a PGM file: too short")
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise DecodeError(f"unsupported magic {magic!r}")
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise DecodeError(f"malformed PGM header: {exc}") from None
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise DecodeError(f"malformed PGM header: {width}x{height} maxval {maxval}")
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        pos += 1
        depth = 1 if maxval < 256 else 2
        payload = data[pos : pos + n * depth]
        if len(payload) < n * depth:
            raise DecodeError(f"truncated payload: expected {n * depth} bytes, got {len(payload)}")
        dtype = np.uint8 if depth == 1 else np.dtype(">u2")
        values = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    else:
        body = data[pos:].split()
        if len(body) < n:
            raise DecodeError(f"truncated payload: expected {n} samples, got {len(body)}")
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.int64)
        except ValueError:
            raise DecodeError("malformed ASCII raster") from None

    if values.max(initial=0) > maxval:
        raise DecodeError("sample exceeds maxval")
    return RasterImage(_rescale(values, maxval).reshape(height, width))


def write_pgm(img: RasterImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img.pixels, dtype=np.uint8).tobytes()


# -- Binarization ------------------------------------------------------------

def otsu_level(img: RasterImage) -> int | None:
    """Smallest threshold maximizing between-class variance, or None if flat.

    Classes are ``value <= t`` and ``value > t``. Scores are compared in exact
    integer arithmetic so that ties resolve deterministically.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).astype(object)
    total = int(img.pixels.size)
    total_sum = sum(int(v) * int(c) for v, c in enumerate(hist))
    best_num, best_den, best_t = 0, 1, None
    n0 = s0 = 0
    for t in range(255):
        n0 += int(hist[t])
        s0 += t * int(hist[t])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        # between-class variance = (total*s0 - n0*sum)^2 / (total^2 * n0 * n1)
        num = (total * s0 - n0 * total_sum) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_num, best_den, best_t = num, den, t
    return best_t


def threshold_otsu(img: RasterImage) -> Threshold:
    level = otsu_level(img)
    if level is None:
        return Threshold(np.zeros(img.pixels.shape, dtype=bool), None, True)
    return Threshold(img.pixels > level, level, False)


# -- Morphology --------------------------------------------------------------

def _offsets(se: np.ndarray):
    half = se.shape[0] // 2
    for dy, dx in zip(*np.nonzero(se)):
        yield int(dy) - half, int(dx) - half


def _shifted(padded: np.ndarray, pad: int, dy: int, dx: int, shape) -> np.ndarray:
    h, w = shape
    return padded[pad + dy : pad + dy + h, pad + dx : pad + dx + w]


def erode(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Pixels where ``se``, centered there, lies entirely inside the foreground."""
    se = _check_se(square_se() if se is None else se)
    mask = np.asarray(mask, dtype=bool)
    pad = se.shape[0] // 2
    padded = np.pad(mask, pad, constant_values=False)
    out = np.ones_like(mask)
    for dy, dx in _offsets(se):
        out &= _shifted(padded, pad, dy, dx, mask.shape)
    return out


def dilate(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Union of ``se`` translated to every foreground pixel."""
    se = _check_se(square_se() if se is None else se)
    mask = np.asarray(mask, dtype=bool)
    pad = se.shape[0] // 2
    padded = np.pad(mask, pad, constant_values=False)
    out = np.zeros_like(mask)
    for dy, dx in _offsets(se):
        out |= _shifted(padded, pad, -dy, -dx, mask.shape)
    return out


def open_mask(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Erosion followed by dilation: removes features the element cannot fit in."""
    return dilate(erode(mask, se), se)


# -- Labeling ----------------------------------------------------------------

_EIGHT = np.ones((3, 3), dtype=bool)


def connected_components(mask: np.ndarray) -> LabelMap:
    """8-connected labeling, labels numbered in raster-scan discovery order."""
    mask = np.asarray(mask, dtype=bool)
    raw, n = ndimage.label(mask, structure=_EIGHT)
    if n == 0:
        return LabelMap(np.zeros(mask.shape, dtype=np.int32), {})
    flat = raw.ravel()
    idx = np.flatnonzero(flat)
    first = np.full(n + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, flat[idx], idx)
    order = np.argsort(first[1:], kind="stable") + 1
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[order] = np.arange(1, n + 1, dtype=np.int32)
    labels = remap[raw]
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    return LabelMap(labels, {k: int(areas[k]) for k in range(1, n + 1)})


def largest_component(labels: LabelMap, min_area: int = 50) -> np.ndarray:
    eligible = [(area, -k) for k, area in labels.component_areas.items() if area >= min_area]
    if not eligible:
        raise DetectionError(f"no component reaches min_area={min_area}")
    _, neg_k = max(eligible)
    return labels.mask(-neg_k)


def fill_holes(mask: np.ndarray) -> np.ndarray:
    return ndimage.binary_fill_holes(np.asarray(mask, dtype=bool))


# -- Edges -------------------------------------------------------------------

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]])
_SOBEL_Y = _SOBEL_X.T


def sobel_edges(mask: np.ndarray) -> np.ndarray:
    """Foreground pixels with nonzero Sobel gradient (edge-replicated border)."""
    mask = np.asarray(mask, dtype=bool)
    padded = np.pad(mask.astype(np.int32), 1, mode="edge")
    h, w = mask.shape
    gx = np.zeros((h, w), dtype=np.int32)
    gy = np.zeros((h, w), dtype=np.int32)
    for i in range(3):
        for j in range(3):
            window = padded[i : i + h, j : j + w]
            gx += _SOBEL_X[i, j] * window
            gy += _SOBEL_Y[i, j] * window
    return mask & ((gx * gx + gy * gy) > 0)
