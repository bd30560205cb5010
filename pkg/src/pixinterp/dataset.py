"""MIAS annotation parsing and annotation-guided ROI extraction.

Each line of the MIAS ``Info.txt`` file reads::

    refnum tissue class [severity [x y radius]]

with ``x, y`` measured from the bottom-left corner of the 1024x1024 image.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifier import Label
from .errors import DecodeError, DetectionError
from .raster import RasterImage, connected_components, fill_holes, largest_component, open_mask, square_se, threshold_otsu

TISSUES = frozenset("FGD")
ABNORMALITIES = frozenset({"CALC", "CIRC", "SPIC", "MISC", "ARCH", "ASYM", "NORM"})
SEVERITIES = {"B": Label.BENIGN, "M": Label.MALIGNANT}


@dataclass(frozen=True)
class MiasRecord:
    refnum: str
    tissue: str
    abnormality: str
    severity: Label | None = None
    center_x: int | None = None
    center_y: int | None = None
    approx_radius: int | None = None

    @property
    def has_coordinates(self) -> bool:
        return self.approx_radius is not None

    def to_line(self) -> str:
        parts = [self.refnum, self.tissue, self.abnormality]
        if self.severity is not None:
            parts.append(self.severity.value[0])
        if self.has_coordinates:
            parts += [str(self.center_x), str(self.center_y), str(self.approx_radius)]
        return " ".join(parts)


@dataclass(frozen=True)
class MiasInfo:
    records: list[MiasRecord]
    rejects: list[tuple[int, str]]


def _parse_line(tokens: list[str]) -> MiasRecord:
    if len(tokens) not in (3, 4, 7):
        raise ValueError(f"expected 3, 4 or 7 columns, got {len(tokens)}")
    refnum, tissue, abnormality = tokens[:3]
    if tissue not in TISSUES:
        raise ValueError(f"unknown tissue class {tissue!r}")
    if abnormality not in ABNORMALITIES:
        raise ValueError(f"unknown abnormality class {abnormality!r}")
    if abnormality == "NORM":
        if len(tokens) != 3:
            raise ValueError("NORM records carry no severity or coordinates")
        return MiasRecord(refnum, tissue, abnormality)
    if len(tokens) == 3:
        raise ValueError("abnormal record without severity")
    if tokens[3] not in SEVERITIES:
        raise ValueError(f"unknown severity {tokens[3]!r}")
    severity = SEVERITIES[tokens[3]]
    if len(tokens) == 4:
        return MiasRecord(refnum, tissue, abnormality, severity)
    x, y, radius = (int(t) for t in tokens[4:7])
    if radius <= 0:
        raise ValueError("radius must be positive")
    return MiasRecord(refnum, tissue, abnormality, severity, x, y, radius)


def parse_mias_info(text: str) -> MiasInfo:
    records, rejects = [], []
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise DecodeError("annotation file is empty")
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            records.append(_parse_line(tokens))
        except ValueError:
            rejects.append((lineno, line))
    return MiasInfo(records, rejects)


def mias_to_image(x: float, y: float, height: int) -> tuple[float, float]:
    """MIAS (x, y) with bottom-left origin -> image (row, col)."""
    return height - 1 - y, x


def extract_roi(
    image: RasterImage,
    record: MiasRecord,
    margin_factor: float = 1.5,
    se_side: int = 3,
    min_area: int = 50,
) -> np.ndarray:
    """Threshold, open and keep the largest blob inside the annotated window.

    The returned mask covers the full canvas with a single filled component.
    """
    if not record.has_coordinates:
        raise DetectionError(f"{record.refnum}: record has no coordinates")
    if margin_factor < 1:
        raise ValueError("margin_factor must be >= 1")
    row, col = mias_to_image(record.center_x, record.center_y, image.height)
    half = margin_factor * record.approx_radius
    r0, r1 = max(0, math.floor(row - half)), min(image.height, math.ceil(row + half) + 1)
    c0, c1 = max(0, math.floor(col - half)), min(image.width, math.ceil(col + half) + 1)
    if r1 - r0 < 2 or c1 - c0 < 2:
        raise DetectionError(f"{record.refnum}: ROI window is degenerate after clamping")

    window = RasterImage(image.pixels[r0:r1, c0:c1])
    thr = threshold_otsu(window)
    if thr.degenerate:
        raise DetectionError(f"{record.refnum}: ROI window has no contrast")
    cleaned = open_mask(thr.mask, square_se(se_side))
    blob = fill_holes(largest_component(connected_components(cleaned), min_area))
    out = np.zeros(image.pixels.shape, dtype=bool)
    out[r0:r1, c0:c1] = blob
    return out
