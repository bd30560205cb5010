"""Interpolated-pixel count: the pixels needed to round a tumor out to its
enclosing circle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DetectionError
from .polygeom import Circle
from .raster import RasterImage


@dataclass(frozen=True)
class InterpolationResult:
    fill_count: int
    protrusion_count: int
    fill_ratio: float
    circle: Circle

    @property
    def symmetric_diff(self) -> int:
        return self.fill_count + self.protrusion_count


def rasterize_disk(circle: Circle, width: int, height: int) -> np.ndarray:
    """Pixels whose centers lie within the circle, clipped to the canvas."""
    if width < 1 or height < 1:
        raise ValueError("canvas must be at least 1x1")
    cx, cy = circle.center
    ys, xs = np.ogrid[:height, :width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= circle.radius**2


def count_interpolated_pixels(tumor: np.ndarray, circle: Circle) -> InterpolationResult:
    tumor = np.asarray(tumor, dtype=bool)
    area = int(np.count_nonzero(tumor))
    if area == 0:
        raise DetectionError("tumor mask is empty")
    disk = rasterize_disk(circle, tumor.shape[1], tumor.shape[0])
    fill = int(np.count_nonzero(disk & ~tumor))
    protrusion = int(np.count_nonzero(tumor & ~disk))
    return InterpolationResult(fill, protrusion, fill / area, circle)


TUMOR, FILL, PROTRUSION = 128, 255, 64


def overlay(tumor: np.ndarray, circle: Circle, edges: np.ndarray | None = None) -> RasterImage:
    """Mid-gray tumor, white fill pixels, dark-gray protrusions on black.

    Edge pixels, if given, are drawn at 192 so the traced ring stays visible.
    """
    tumor = np.asarray(tumor, dtype=bool)
    disk = rasterize_disk(circle, tumor.shape[1], tumor.shape[0])
    out = np.zeros(tumor.shape, dtype=np.uint8)
    out[tumor & disk] = TUMOR
    out[tumor & ~disk] = PROTRUSION
    out[disk & ~tumor] = FILL
    if edges is not None:
        out[np.asarray(edges, dtype=bool) & disk] = 192
    return RasterImage(out)
