"""Polygon through the signature maxima, shoelace area/centroid, and the
mean-radius circle around it."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError
from .signature import Centroid, SignatureExtrema, polar_to_cartesian

Point = tuple[float, float]


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise DegenerateError(f"a polygon needs at least 3 vertices, got {len(verts)}")
        for a, b in zip(verts, verts[1:] + verts[:1]):
            if a == b:
                raise DegenerateError("consecutive polygon vertices coincide")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def reversed(self) -> "Polygon":
        return Polygon(self.vertices[::-1])

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple((x + dx, y + dy) for x, y in self.vertices))


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float
    # largest center-to-vertex distance; None when not built from a polygon
    outer_radius: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise DegenerateError(f"circle radius must be positive and finite, got {self.radius}")


def polygon_from_extrema(extrema: SignatureExtrema, centroid: Centroid) -> Polygon:
    if len(extrema) < 3:
        raise DegenerateError(f"need at least 3 extrema for a polygon, got {len(extrema)}")
    pts = sorted(extrema.points, key=lambda e: e.theta)
    poly = Polygon(tuple(polar_to_cartesian(e.r, e.theta, centroid) for e in pts))
    if not is_simple(poly):
        raise DegenerateError("extrema polygon self-intersects")
    return poly


def _cross_terms(poly: Polygon) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = np.asarray(poly.vertices)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return x * yn - xn * y, x + xn, y + yn


def shoelace_area(poly: Polygon) -> float:
    """Signed area; positive when vertices run counterclockwise in a y-up frame."""
    cross, _, _ = _cross_terms(poly)
    return 0.5 * float(cross.sum())


def polygon_centroid(poly: Polygon) -> Point:
    cross, sx, sy = _cross_terms(poly)
    area = 0.5 * float(cross.sum())
    if abs(area) < 1e-12:
        raise DegenerateError("centroid of a zero-area polygon is undefined")
    return float((sx * cross).sum() / (6 * area)), float((sy * cross).sum() / (6 * area))


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return (
        (d1 == 0 and _on_segment(q1, q2, p1))
        or (d2 == 0 and _on_segment(q1, q2, p2))
        or (d3 == 0 and _on_segment(p1, p2, q1))
        or (d4 == 0 and _on_segment(p1, p2, q2))
    )


def is_simple(poly: Polygon) -> bool:
    v = poly.vertices
    n = len(v)
    edges = [(v[i], v[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        for j in range(i + 1, n):
            c, d = edges[j]
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent sides share one vertex; they may not fold back onto each other
                shared, other_i, other_j = (b, a, d) if j == i + 1 else (a, b, c)
                if _orient(other_i, shared, other_j) == 0 and (
                    _on_segment(shared, other_i, other_j) or _on_segment(shared, other_j, other_i)
                ):
                    return False
            elif segments_intersect(a, b, c, d):
                return False
    return True


def enclosing_circle(poly: Polygon) -> Circle:
    """Circle centred on the polygon centroid with the mean vertex distance as radius."""
    cx, cy = polygon_centroid(poly)
    v = np.asarray(poly.vertices)
    dist = np.hypot(v[:, 0] - cx, v[:, 1] - cy)
    return Circle((cx, cy), float(dist.mean()), float(dist.max()))


# -- Minimum enclosing circle (degenerate fallback only) ----------------------

def _circle_two(a: Point, b: Point) -> tuple[Point, float]:
    c = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return c, math.dist(a, c)


def _circle_three(a: Point, b: Point, c: Point) -> tuple[Point, float] | None:
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0:
        return None
    a2, b2, c2 = a[0] ** 2 + a[1] ** 2, b[0] ** 2 + b[1] ** 2, c[0] ** 2 + c[1] ** 2
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return (ux, uy), math.dist((ux, uy), a)


def minimum_enclosing_circle(points, seed: int = 0) -> Circle:
    """Welzl's algorithm, iterative form, with a seeded shuffle."""
    pts = list({(float(x), float(y)) for x, y in points})
    if not pts:
        raise DegenerateError("no points to enclose")
    pts.sort()
    random.Random(seed).shuffle(pts)
    eps = 1e-9

    def contains(c, r, p):
        return math.dist(c, p) <= r + eps

    center, radius = pts[0], 0.0
    for i, p in enumerate(pts):
        if contains(center, radius, p):
            continue
        center, radius = p, 0.0
        for j in range(i):
            q = pts[j]
            if contains(center, radius, q):
                continue
            center, radius = _circle_two(p, q)
            for k in range(j):
                s = pts[k]
                if contains(center, radius, s):
                    continue
                three = _circle_three(p, q, s)
                if three is None:
                    # collinear: the widest pair spans the circle
                    pairs = [(p, q), (p, s), (q, s)]
                    center, radius = _circle_two(*max(pairs, key=lambda ab: math.dist(*ab)))
                else:
                    center, radius = three
    # a single pixel still occupies a half-pixel disk
    return Circle(center, max(radius, 0.5), max(radius, 0.5))


def geometry_json(poly: Polygon | None, circle: Circle) -> str:
    record = {
        "vertices": [list(v) for v in poly.vertices] if poly is not None else [],
        "center": list(circle.center),
        "radius": circle.radius,
        "outer_radius": circle.outer_radius,
    }
    return json.dumps(record, indent=2)
