"""Synthetic tumor masks with closed-form radial profiles.

The lobed family ``r(theta) = R (1 + a cos(k (theta - rotation)))`` has a known
area (``pi R^2 (1 + a^2 / 2)``), exactly ``k`` maxima and known maximum angles,
which makes it a ground truth for every later stage.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .classifier import Label
from .signature import TWO_PI


class ShapeKind(str, enum.Enum):
    DISK = "Disk"
    ELLIPSE = "Ellipse"
    LOBULAR = "Lobular"
    SPICULATED = "Spiculated"


@dataclass(frozen=True)
class ShapeSpec:
    kind: ShapeKind
    base_radius: float
    lobes: int = 0
    amplitude: float = 0.0
    axis_ratio: float = 1.0
    rotation: float = 0.0
    center: tuple[float, float] | None = None
    noise_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.base_radius < 5:
            raise ValueError("base_radius must be at least 5 px")
        if not 0 <= self.amplitude < 1:
            raise ValueError("amplitude must lie in [0, 1)")
        if self.kind in (ShapeKind.LOBULAR, ShapeKind.SPICULATED) and self.lobes < 2:
            raise ValueError("lobed shapes need at least 2 lobes")
        if self.kind is ShapeKind.ELLIPSE and not 0 < self.axis_ratio <= 1:
            raise ValueError("axis_ratio must lie in (0, 1]")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be non-negative")

    @property
    def max_radius(self) -> float:
        r = self.base_radius
        if self.kind in (ShapeKind.LOBULAR, ShapeKind.SPICULATED):
            r *= 1 + self.amplitude
        return r + self.noise_amplitude

    def canvas_side(self, margin: int = 4) -> int:
        return 2 * (math.ceil(self.max_radius) + margin) + 1

    def to_row(self) -> dict:
        row = asdict(self)
        row["kind"] = self.kind.value
        row.pop("center")
        return row


def _noise_profile(spec: ShapeSpec, theta: np.ndarray) -> np.ndarray:
    """Smooth seeded radial perturbation bounded by ``noise_amplitude``."""
    if spec.noise_amplitude == 0:
        return np.zeros_like(theta)
    rng = np.random.default_rng(spec.seed)
    orders = np.arange(3, 17)
    coef = rng.normal(size=orders.size) / orders
    phase = rng.uniform(0, TWO_PI, size=orders.size)
    bound = np.abs(coef).sum()
    wave = sum(c * np.cos(k * theta + p) for k, c, p in zip(orders, coef, phase))
    return spec.noise_amplitude * wave / bound


def radius_profile(spec: ShapeSpec, theta: np.ndarray) -> np.ndarray:
    phi = theta - spec.rotation
    R = spec.base_radius
    if spec.kind is ShapeKind.DISK:
        r = np.full_like(theta, R, dtype=float)
    elif spec.kind is ShapeKind.ELLIPSE:
        a, b = R, R * spec.axis_ratio
        r = a * b / np.sqrt((b * np.cos(phi)) ** 2 + (a * np.sin(phi)) ** 2)
    else:
        r = R * (1 + spec.amplitude * np.cos(spec.lobes * phi))
    return r + _noise_profile(spec, theta)


def generate_shape(spec: ShapeSpec, width: int | None = None, height: int | None = None) -> np.ndarray:
    """Rasterize ``spec``: a pixel is foreground iff its centre lies within r(theta)."""
    side = spec.canvas_side()
    width = side if width is None else width
    height = side if height is None else height
    cx, cy = spec.center if spec.center is not None else ((width - 1) / 2, (height - 1) / 2)
    reach = spec.max_radius
    if cx - reach < 0 or cy - reach < 0 or cx + reach > width - 1 or cy + reach > height - 1:
        raise ValueError("shape does not fit inside the canvas")
    ys, xs = np.mgrid[:height, :width].astype(float)
    dx, dy = xs - cx, ys - cy
    theta = np.mod(np.arctan2(-dy, dx), TWO_PI)
    return np.hypot(dx, dy) <= radius_profile(spec, theta)


@dataclass(frozen=True)
class CorpusItem:
    name: str
    mask: np.ndarray
    label: Label
    spec: ShapeSpec


def _benign_spec(rng: np.random.Generator, seed: int) -> ShapeSpec:
    kind = (ShapeKind.DISK, ShapeKind.ELLIPSE, ShapeKind.LOBULAR)[rng.integers(3)]
    common = dict(
        base_radius=float(rng.uniform(15, 40)),
        rotation=float(rng.uniform(0, TWO_PI)),
        noise_amplitude=float(rng.uniform(0, 0.5)),
        seed=seed,
    )
    if kind is ShapeKind.ELLIPSE:
        return ShapeSpec(kind, axis_ratio=float(rng.uniform(0.75, 0.95)), **common)
    if kind is ShapeKind.LOBULAR:
        return ShapeSpec(kind, lobes=int(rng.integers(3, 7)), amplitude=float(rng.uniform(0.03, 0.1)), **common)
    return ShapeSpec(kind, **common)


def _malignant_spec(rng: np.random.Generator, seed: int) -> ShapeSpec:
    return ShapeSpec(
        ShapeKind.SPICULATED,
        base_radius=float(rng.uniform(15, 40)),
        lobes=int(rng.integers(5, 13)),
        amplitude=float(rng.uniform(0.3, 0.6)),
        rotation=float(rng.uniform(0, TWO_PI)),
        noise_amplitude=float(rng.uniform(0, 0.5)),
        seed=seed,
    )


def generate_corpus(n_per_class: int, seed: int = 0) -> list[CorpusItem]:
    """Benign proxies (disks, ellipses, faint lobes) then spiculated malignant proxies."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be at least 1")
    rng = np.random.default_rng(seed)
    items = []
    for label, make in ((Label.BENIGN, _benign_spec), (Label.MALIGNANT, _malignant_spec)):
        for i in range(n_per_class):
            spec = make(rng, int(rng.integers(2**31)))
            # sub-pixel centre offset so digitization differs between shapes
            side = spec.canvas_side()
            off = rng.uniform(-0.5, 0.5, size=2)
            spec = ShapeSpec(**{**asdict(spec), "center": ((side - 1) / 2 + off[0], (side - 1) / 2 + off[1])})
            name = f"syn_{label.value[0].lower()}{i:03d}"
            items.append(CorpusItem(name, generate_shape(spec, side, side), label, spec))
    return items


def textured_image(mask: np.ndarray, seed: int = 0, background: float = 70.0,
                   foreground: float = 190.0, noise: float = 12.0) -> np.ndarray:
    """Gray-level render of a mask: bright mass on a darker noisy field."""
    rng = np.random.default_rng(seed)
    img = np.where(mask, foreground, background) + rng.normal(0, noise, size=mask.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)
