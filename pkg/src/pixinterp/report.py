"""Per-image feature rows and their CSV form."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields

from .classifier import Label
from .errors import DecodeError
from .pipeline import Analysis


@dataclass(frozen=True)
class FeatureRecord:
    image_id: str
    label: Label | None = None
    area: int | None = None
    perimeter_weighted: float | None = None
    perimeter_count: int | None = None
    circularity: float | None = None
    roundness: float | None = None
    compactness: float | None = None
    n_extrema: int | None = None
    region_centroid_x: float | None = None
    region_centroid_y: float | None = None
    polygon_centroid_x: float | None = None
    polygon_centroid_y: float | None = None
    circle_center_x: float | None = None
    circle_center_y: float | None = None
    circle_radius: float | None = None
    circle_outer_radius: float | None = None
    fill_count: int | None = None
    protrusion_count: int | None = None
    symmetric_diff: int | None = None
    fill_ratio: float | None = None
    degenerate_flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def failed(self) -> bool:
        return any(f.startswith("error:") for f in self.degenerate_flags)

    @classmethod
    def from_analysis(cls, image_id: str, a: Analysis, label: Label | None = None) -> "FeatureRecord":
        poly_c = a.polygon_centroid or (None, None)
        return cls(
            image_id=image_id,
            label=label,
            area=a.features.area,
            perimeter_weighted=a.features.perimeter,
            perimeter_count=a.features.perimeter_px,
            circularity=a.features.circularity,
            roundness=a.features.roundness,
            compactness=a.features.compactness,
            n_extrema=len(a.extrema),
            region_centroid_x=a.centroid.c_bar,
            region_centroid_y=a.centroid.r_bar,
            polygon_centroid_x=poly_c[0],
            polygon_centroid_y=poly_c[1],
            circle_center_x=a.circle.center[0],
            circle_center_y=a.circle.center[1],
            circle_radius=a.circle.radius,
            circle_outer_radius=a.circle.outer_radius,
            fill_count=a.interpolation.fill_count,
            protrusion_count=a.interpolation.protrusion_count,
            symmetric_diff=a.interpolation.symmetric_diff,
            fill_ratio=a.interpolation.fill_ratio,
            degenerate_flags=tuple(a.flags),
        )

    @classmethod
    def failure(cls, image_id: str, stage: str, label: Label | None = None) -> "FeatureRecord":
        return cls(image_id=image_id, label=label, degenerate_flags=(f"error:{stage}",))


COLUMNS = [f.name for f in fields(FeatureRecord)]
_INT = {"area", "perimeter_count", "n_extrema", "fill_count", "protrusion_count", "symmetric_diff"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Label):
        return value.value
    if isinstance(value, tuple):
        return ";".join(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def records_to_csv(records: list[FeatureRecord]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(COLUMNS)
    for rec in records:
        out.writerow([_fmt(getattr(rec, c)) for c in COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[FeatureRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "image_id" not in reader.fieldnames:
        raise DecodeError("feature CSV lacks an image_id column")
    out = []
    for lineno, row in enumerate(reader, start=2):
        kwargs = {}
        try:
            for name in COLUMNS:
                raw = (row.get(name) or "").strip()
                if name == "image_id":
                    kwargs[name] = raw
                elif name == "label":
                    kwargs[name] = Label.parse(raw) if raw else None
                elif name == "degenerate_flags":
                    kwargs[name] = tuple(raw.split(";")) if raw else ()
                elif raw:
                    value = float(raw)
                    if not math.isfinite(value):
                        raise ValueError(f"non-finite {name}")
                    kwargs[name] = int(value) if name in _INT else value
        except ValueError as exc:
            raise DecodeError(f"feature CSV line {lineno}: {exc}") from None
        out.append(FeatureRecord(**kwargs))
    return out
