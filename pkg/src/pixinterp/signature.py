"""Radial border signature of a region and the maxima that seed the polygon.

Angles are measured counterclockwise from +x in the mathematical frame, i.e.
``theta = atan2(-(row - r_bar), col - c_bar)``, so a point straight "up" in the
image sits at ``pi/2``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError

TWO_PI = 2.0 * math.pi

# Moore neighborhood in (drow, dcol), clockwise on screen starting at north.
_MOORE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
_WEST = 6


@dataclass(frozen=True)
class Centroid:
    r_bar: float
    c_bar: float


@dataclass(frozen=True)
class RadialSignature:
    centroid: Centroid
    radii: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.radii)

    @property
    def bin_width(self) -> float:
        return TWO_PI / self.n_bins

    def bin_of(self, theta: float) -> int:
        return int(math.floor((theta % TWO_PI) / self.bin_width)) % self.n_bins

    def bin_center(self, k: int) -> float:
        return (k + 0.5) * self.bin_width


@dataclass(frozen=True)
class Extremum:
    theta: float
    r: float
    bin: int


@dataclass(frozen=True)
class SignatureExtrema:
    points: tuple[Extremum, ...]
    fallback: bool = False

    def __len__(self):
        return len(self.points)


def region_centroid(mask: np.ndarray) -> Centroid:
    rows, cols = np.nonzero(mask)
    if rows.size == 0:
        raise DegenerateError("centroid of an empty region")
    return Centroid(float(rows.mean()), float(cols.mean()))


def trace_boundary(mask: np.ndarray) -> list[tuple[int, int]]:
    """Moore-neighbor tracing with Jacob's stopping criterion.

    Starts at the top-most, then left-most foreground pixel and walks clockwise
    on screen. Returns ``(row, col)`` points; the chain is implicitly closed.
    Only the component containing the start pixel is traced.
    """
    mask = np.asarray(mask, dtype=bool)
    fg = np.argwhere(mask)
    if fg.size == 0:
        raise DegenerateError("cannot trace the boundary of an empty mask")
    h, w = mask.shape
    start = (int(fg[0, 0]), int(fg[0, 1]))

    def inside(r, c):
        return 0 <= r < h and 0 <= c < w and mask[r, c]

    def step(cur, back_dir):
        # scan clockwise from the backtrack neighbor; return next pixel and
        # the direction from it back to the last background cell checked
        r, c = cur
        for k in range(1, 9):
            d = (back_dir + k) % 8
            nr, nc = r + _MOORE[d][0], c + _MOORE[d][1]
            if inside(nr, nc):
                pr, pc = r + _MOORE[(d - 1) % 8][0], c + _MOORE[(d - 1) % 8][1]
                back = _direction((pr - nr, pc - nc))
                return (nr, nc), back
        return None, back_dir

    chain = [start]
    nxt, back = step(start, _WEST)
    if nxt is None:
        return chain
    second = nxt
    cur = nxt
    limit = 4 * int(mask.sum()) + 16
    for _ in range(limit):
        if cur == start:
            peek, _ = step(cur, back)
            if peek == second:
                return chain
        chain.append(cur)
        cur, back = step(cur, back)
    raise RuntimeError("boundary tracing did not terminate")


def _direction(delta: tuple[int, int]) -> int:
    return _MOORE.index(delta)


def radial_signature(
    chain: list[tuple[int, int]], centroid: Centroid, n_bins: int = 360
) -> RadialSignature:
    """Maximum centroid distance per angular bin, gaps filled circularly."""
    if n_bins < 8:
        raise ValueError(f"n_bins must be at least 8, got {n_bins}")
    if not chain:
        raise ValueError("empty boundary chain")
    pts = np.asarray(chain, dtype=float)
    dy = pts[:, 0] - centroid.r_bar
    dx = pts[:, 1] - centroid.c_bar
    dist = np.hypot(dx, dy)
    if not np.any(dist > 0):
        raise DegenerateError("region has zero extent around its centroid")
    theta = np.mod(np.arctan2(-dy, dx), TWO_PI)
    bins = np.minimum((theta / (TWO_PI / n_bins)).astype(int), n_bins - 1)

    radii = np.full(n_bins, np.nan)
    for b, d in zip(bins, dist):
        if not d <= radii[b]:
            radii[b] = d
    return RadialSignature(centroid, _fill_circular(radii))


def _fill_circular(values: np.ndarray) -> np.ndarray:
    known = np.flatnonzero(~np.isnan(values))
    n = len(values)
    if len(known) == n:
        return values
    if len(known) == 1:
        return np.full(n, values[known[0]])
    # unwrap around the circle by appending the first known bin shifted by n
    xp = np.concatenate([known - n, known, known + n])
    fp = np.tile(values[known], 3)
    return np.interp(np.arange(n), xp, fp)


def smooth_signature(sig: RadialSignature, window: int = 5) -> RadialSignature:
    if window < 1 or window % 2 == 0 or window >= sig.n_bins:
        raise ValueError(f"window must be odd, >= 1 and < n_bins, got {window}")
    if window == 1:
        return sig
    half = window // 2
    padded = np.concatenate([sig.radii[-half:], sig.radii, sig.radii[:half]])
    smoothed = np.convolve(padded, np.full(window, 1.0 / window), mode="valid")
    return RadialSignature(sig.centroid, smoothed)


def _peak_bins(r: np.ndarray) -> list[int]:
    """Bins where the circular slope turns from rising to falling.

    A flat top is collapsed to its middle bin; for an isolated top this is
    exactly "first difference + then -, second difference < 0".
    """
    n = len(r)
    diff = np.roll(r, -1) - r  # diff[i] = r[i+1] - r[i]
    if not np.any(diff != 0):
        return []
    peaks = []
    # rotate so that bin 0 starts right after a nonzero slope
    anchor = int(np.flatnonzero(diff != 0)[0]) + 1
    i = 0
    while i < n:
        k = (anchor + i) % n
        prev = diff[(k - 1) % n]
        if prev > 0:
            j = 0
            while diff[(k + j) % n] == 0:
                j += 1
            if diff[(k + j) % n] < 0:
                peaks.append((k + j // 2) % n)
            i += j + 1
        else:
            i += 1
    return sorted(peaks)


def _prominence(r: np.ndarray, k: int) -> float:
    n = len(r)
    peak = r[k]
    bases = []
    for sign in (-1, 1):
        lowest = peak
        for j in range(1, n):
            v = r[(k + sign * j) % n]
            if v > peak:
                break
            lowest = min(lowest, v)
        bases.append(lowest)
    return float(peak - max(bases))


def _circular_gap(a: int, b: int, n: int) -> int:
    d = abs(a - b) % n
    return min(d, n - d)


def _select_separated(cands: list[int], r: np.ndarray, min_separation: int) -> list[int]:
    kept: list[int] = []
    n = len(r)
    for k in sorted(cands, key=lambda b: (-r[b], b)):
        if all(_circular_gap(k, j, n) >= min_separation for j in kept):
            kept.append(k)
    return sorted(kept)


def find_maxima(
    sig: RadialSignature, prominence: float = 2.0, min_separation: int = 5
) -> SignatureExtrema:
    r = sig.radii
    cands = [k for k in _peak_bins(r) if _prominence(r, k) >= prominence and r[k] > 0]
    kept = _select_separated(cands, r, min_separation)
    return SignatureExtrema(tuple(Extremum(sig.bin_center(k), float(r[k]), k) for k in kept))


def fallback_extrema(sig: RadialSignature, sectors: int = 8) -> SignatureExtrema:
    """Largest-radius bin of each equal angular sector.

    Used when too few genuine maxima exist (round or oval outlines); spreading
    the vertices around the full circle keeps the polygon centred on the region.
    """
    r = sig.radii
    edges = np.linspace(0, sig.n_bins, sectors + 1).astype(int)
    picks = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            picks.append(lo + int(np.argmax(r[lo:hi])))
    points = tuple(Extremum(sig.bin_center(k), float(r[k]), k) for k in picks if r[k] > 0)
    return SignatureExtrema(points, fallback=True)


def polar_to_cartesian(r: float, theta: float, centroid: Centroid) -> tuple[float, float]:
    """Return image ``(x, y)`` for a polar point about ``centroid``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    return centroid.c_bar + r * math.cos(theta), centroid.r_bar - r * math.sin(theta)


def signature_csv(sig: RadialSignature) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["bin_index", "theta_radians", "radius_px"])
    for k, rad in enumerate(sig.radii):
        out.writerow([k, f"{sig.bin_center(k):.6g}", f"{rad:.6g}"])
    return buf.getvalue()


def extrema_csv(extrema: SignatureExtrema, centroid: Centroid) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["theta", "r", "x", "y"])
    for e in extrema.points:
        x, y = polar_to_cartesian(e.r, e.theta, centroid)
        out.writerow([f"{e.theta:.6g}", f"{e.r:.6g}", f"{x:.6g}", f"{y:.6g}"])
    return buf.getvalue()
