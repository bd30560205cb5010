"""Geometric shape descriptors of a region: area, perimeter, circularity,
roundness and compactness."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GeoFeatures:
    area: int
    perimeter: float
    perimeter_px: int
    circularity: float
    roundness: float
    compactness: float


def region_area(mask: np.ndarray) -> int:
    return int(np.count_nonzero(mask))


def region_perimeter(chain: list[tuple[int, int]]) -> tuple[float, int]:
    """Chain length with unit axial and sqrt(2) diagonal steps, plus the point count."""
    if not chain:
        raise ValueError("empty boundary chain")
    if len(chain) == 1:
        return 0.0, 1
    pts = np.asarray(chain)
    steps = np.abs(np.roll(pts, -1, axis=0) - pts)
    diagonal = int(np.count_nonzero((steps[:, 0] == 1) & (steps[:, 1] == 1)))
    return (len(pts) - diagonal) + diagonal * math.sqrt(2), len(pts)


def compute_features(area: int, perimeter: float, perimeter_px: int | None = None) -> GeoFeatures:
    if area < 1 or not perimeter > 0:
        raise ValueError(f"area and perimeter must be positive, got {area}, {perimeter}")
    circularity = 4 * math.pi * area / perimeter**2
    # roundness is printed with the same expression as circularity
    roundness = circularity
    return GeoFeatures(
        area=int(area),
        perimeter=float(perimeter),
        perimeter_px=int(perimeter_px) if perimeter_px is not None else 0,
        circularity=circularity,
        roundness=roundness,
        compactness=math.sqrt(roundness),
    )
