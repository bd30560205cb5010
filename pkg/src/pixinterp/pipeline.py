"""End-to-end analysis of one region: mask -> signature -> polygon -> circle
-> interpolated-pixel count."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ConfigError, DegenerateError, DetectionError
from .features import GeoFeatures, compute_features, region_area, region_perimeter
from .interp import InterpolationResult, count_interpolated_pixels
from .polygeom import Circle, Polygon, enclosing_circle, minimum_enclosing_circle, polygon_centroid, polygon_from_extrema
from .raster import (
    RasterImage,
    connected_components,
    fill_holes,
    largest_component,
    open_mask,
    sobel_edges,
    square_se,
    threshold_otsu,
)
from .signature import (
    Centroid,
    RadialSignature,
    SignatureExtrema,
    fallback_extrema,
    find_maxima,
    radial_signature,
    region_centroid,
    smooth_signature,
    trace_boundary,
)

FEATURE_MODES = ("count-ratio", "count-only", "symdiff")


@dataclass(frozen=True)
class RunConfig:
    n_bins: int = 360
    smoothing_window: int = 5
    prominence: float = 2.0
    min_separation: int = 5
    se_side: int = 3
    min_area: int = 50
    margin_factor: float = 1.5
    regularization: float = 0.01
    epochs: int = 200
    seed: int = 0
    feature_mode: str = "count-ratio"
    train_fraction: float = 0.7

    def __post_init__(self):
        problems = []
        if self.n_bins < 8:
            problems.append("n_bins must be >= 8")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0 or self.smoothing_window >= self.n_bins:
            problems.append("smoothing_window must be odd, >= 1 and < n_bins")
        if self.prominence < 0:
            problems.append("prominence must be >= 0")
        if self.min_separation < 1:
            problems.append("min_separation must be >= 1")
        if self.se_side < 1 or self.se_side % 2 == 0:
            problems.append("se_side must be odd and positive")
        if self.min_area < 1:
            problems.append("min_area must be >= 1")
        if self.margin_factor < 1:
            problems.append("margin_factor must be >= 1")
        if not self.regularization > 0:
            problems.append("regularization must be > 0")
        if self.epochs < 1:
            problems.append("epochs must be >= 1")
        if self.feature_mode not in FEATURE_MODES:
            problems.append(f"feature_mode must be one of {FEATURE_MODES}")
        if not 0 < self.train_fraction <= 1:
            problems.append("train_fraction must lie in (0, 1]")
        if problems:
            raise ConfigError("; ".join(problems))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class Analysis:
    mask: np.ndarray
    centroid: Centroid
    chain: list
    signature: RadialSignature
    smoothed: RadialSignature
    extrema: SignatureExtrema
    vertex_extrema: SignatureExtrema
    polygon: Polygon | None
    polygon_centroid: tuple[float, float] | None
    circle: Circle
    features: GeoFeatures
    interpolation: InterpolationResult
    edges: np.ndarray
    flags: list[str] = field(default_factory=list)

    def feature_vector(self, mode: str = "count-ratio") -> tuple[float, ...]:
        return feature_vector(self.interpolation.fill_count, self.interpolation.fill_ratio,
                              self.interpolation.symmetric_diff, mode)


def feature_vector(fill_count: float, fill_ratio: float, symmetric_diff: float, mode: str) -> tuple[float, ...]:
    if mode == "count-ratio":
        return (float(fill_count), float(fill_ratio))
    if mode == "count-only":
        return (float(fill_count),)
    if mode == "symdiff":
        return (float(symmetric_diff),)
    raise ConfigError(f"unknown feature mode {mode!r}")


def analyze_mask(mask: np.ndarray, config: RunConfig = RunConfig()) -> Analysis:
    """Run every geometric stage on a single-region mask."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise DetectionError("empty tumor mask")
    flags: list[str] = []
    centroid = region_centroid(mask)
    chain = trace_boundary(mask)
    raw = radial_signature(chain, centroid, config.n_bins)
    smoothed = smooth_signature(raw, config.smoothing_window)
    extrema = vertex_extrema = find_maxima(smoothed, config.prominence, config.min_separation)
    if len(extrema) < 3:
        # near-circular outlines: expected, not degenerate (see vertex_extrema.fallback)
        vertex_extrema = fallback_extrema(smoothed)

    poly = poly_c = None
    try:
        poly = polygon_from_extrema(vertex_extrema, centroid)
        poly_c = polygon_centroid(poly)
        circle = enclosing_circle(poly)
    except DegenerateError:
        flags.append("degenerate_polygon")
        circle = minimum_enclosing_circle([(c, r) for r, c in chain], seed=config.seed)

    length, count = region_perimeter(chain)
    area = region_area(mask)
    if length <= 0:
        flags.append("zero_perimeter")
        length = 1.0
    feats = compute_features(area, length, count)
    interp = count_interpolated_pixels(mask, circle)
    return Analysis(mask, centroid, chain, raw, smoothed, extrema, vertex_extrema, poly, poly_c, circle,
                    feats, interp, sobel_edges(mask), flags)


def segment(img: RasterImage, config: RunConfig = RunConfig()) -> np.ndarray:
    """Otsu, opening, largest component, hole filling."""
    thr = threshold_otsu(img)
    if thr.degenerate:
        raise DetectionError("image has no contrast to threshold")
    cleaned = open_mask(thr.mask, square_se(config.se_side))
    region = largest_component(connected_components(cleaned), config.min_area)
    return fill_holes(region)
