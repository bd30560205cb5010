import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import flood_fill_count
from pixinterp.signature import find_maxima, radial_signature, region_centroid, smooth_signature, trace_boundary
from pixinterp.synth import (
    ShapeKind,
    ShapeSpec,
    generate_corpus,
    generate_shape,
    radius_profile,
    textured_image,
)


def n_maxima(mask):
    chain = trace_boundary(mask)
    sig = smooth_signature(radial_signature(chain, region_centroid(mask)))
    return len(find_maxima(sig))


def test_zero_amplitude_spiculated_equals_disk():
    spiky = generate_shape(ShapeSpec(ShapeKind.SPICULATED, 25, lobes=7, amplitude=0.0))
    disk = generate_shape(ShapeSpec(ShapeKind.DISK, 25))
    assert np.array_equal(spiky, disk)


def test_disk_area():
    assert generate_shape(ShapeSpec(ShapeKind.DISK, 30)).sum() == pytest.approx(math.pi * 900, rel=0.02)


def test_lobed_area_matches_polar_integral():
    R, a = 40, 0.3
    area = generate_shape(ShapeSpec(ShapeKind.SPICULATED, R, lobes=8, amplitude=a)).sum()
    # (1/2) * integral of R^2 (1 + a cos 8t)^2 dt over a full turn
    assert area == pytest.approx(math.pi * R**2 * (1 + a * a / 2), rel=0.05)


def test_ellipse_area():
    area = generate_shape(ShapeSpec(ShapeKind.ELLIPSE, 30, axis_ratio=0.6, rotation=0.7)).sum()
    assert area == pytest.approx(math.pi * 30 * 18, rel=0.03)


def test_noise_is_bounded():
    spec = ShapeSpec(ShapeKind.DISK, 20, noise_amplitude=1.5, seed=7)
    theta = np.linspace(0, 2 * math.pi, 2000)
    r = radius_profile(spec, theta)
    assert np.all(np.abs(r - 20) <= 1.5 + 1e-12)
    assert np.ptp(r) > 0


@pytest.mark.parametrize("kwargs", [
    dict(kind=ShapeKind.DISK, base_radius=4),
    dict(kind=ShapeKind.SPICULATED, base_radius=20, lobes=5, amplitude=1.0),
    dict(kind=ShapeKind.LOBULAR, base_radius=20, lobes=1, amplitude=0.1),
    dict(kind=ShapeKind.ELLIPSE, base_radius=20, axis_ratio=1.5),
    dict(kind=ShapeKind.DISK, base_radius=20, noise_amplitude=-1),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        ShapeSpec(**kwargs)


def test_shape_must_fit():
    with pytest.raises(ValueError, match="fit"):
        generate_shape(ShapeSpec(ShapeKind.DISK, 20), 30, 30)
    with pytest.raises(ValueError, match="fit"):
        generate_shape(ShapeSpec(ShapeKind.DISK, 10, center=(5.0, 40.0)), 80, 80)


def test_corpus_deterministic():
    a, b = generate_corpus(1, seed=42), generate_corpus(1, seed=42)
    assert [i.name for i in a] == ["syn_b000", "syn_m000"]
    for x, y in zip(a, b):
        assert np.array_equal(x.mask, y.mask) and x.spec == y.spec


def test_corpus_counts_and_ranges():
    items = generate_corpus(40, seed=0)
    labels = [i.label.value for i in items]
    assert labels.count("Benign") == 40 and labels.count("Malignant") == 40
    for item in items:
        if item.label.value == "Benign":
            assert item.spec.kind in (ShapeKind.DISK, ShapeKind.ELLIPSE, ShapeKind.LOBULAR)
            assert item.spec.amplitude <= 0.1
        else:
            assert item.spec.kind is ShapeKind.SPICULATED
            assert 0.3 <= item.spec.amplitude <= 0.6 and 5 <= item.spec.lobes <= 12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.floats(0, 0.9), st.floats(6, 30), st.floats(0, 1.0), st.integers(0, 1000))
def test_shapes_are_single_components(k, a, R, noise, seed):
    spec = ShapeSpec(ShapeKind.SPICULATED, R, lobes=k, amplitude=a, noise_amplitude=noise, seed=seed)
    assert flood_fill_count(generate_shape(spec)) == 1


@pytest.mark.parametrize("k", [3, 5, 8])
def test_rotation_by_lobe_period(k):
    base = ShapeSpec(ShapeKind.SPICULATED, 30, lobes=k, amplitude=0.4, rotation=0.3)
    turned = ShapeSpec(ShapeKind.SPICULATED, 30, lobes=k, amplitude=0.4, rotation=0.3 + 2 * math.pi / k)
    m1, m2 = generate_shape(base), generate_shape(turned)
    assert np.mean(m1 == m2) >= 0.99


@pytest.mark.parametrize("k", range(2, 9))
@pytest.mark.parametrize("a", [0.2, 0.35, 0.5])
def test_k_lobes_give_k_maxima(k, a):
    assert n_maxima(generate_shape(ShapeSpec(ShapeKind.SPICULATED, 30, lobes=k, amplitude=a))) == k


def test_textured_image():
    mask = generate_shape(ShapeSpec(ShapeKind.DISK, 15))
    img = textured_image(mask, seed=1)
    assert img.dtype == np.uint8 and img.shape == mask.shape
    assert img[mask].mean() > img[~mask].mean() + 80
    assert np.array_equal(img, textured_image(mask, seed=1))
