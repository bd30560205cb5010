import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import boundary_by_scan, brute_otsu, flood_fill_count, naive_erode, rasterized_disk
from pixinterp.errors import DecodeError, DetectionError
from pixinterp.raster import (
    RasterImage,
    connected_components,
    dilate,
    erode,
    largest_component,
    open_mask,
    otsu_level,
    read_pgm,
    sobel_edges,
    square_se,
    threshold_otsu,
    write_pgm,
)

masks = arrays(np.bool_, st.tuples(st.integers(1, 24), st.integers(1, 24)))
images = arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16)))


# -- PGM -----------------------------------------------------------------------

def test_read_p5():
    img = read_pgm(b"P5 2 2 255\n" + bytes([0, 64, 128, 255]))
    assert (img.width, img.height) == (2, 2)
    assert img.pixels.tolist() == [[0, 64], [128, 255]]


def test_p2_matches_p5():
    p5 = read_pgm(b"P5 2 2 255\n" + bytes([0, 64, 128, 255]))
    p2 = read_pgm(b"P2\n# a comment\n2 2\n255\n0 64\n128 255\n")
    assert p2 == p5


def test_truncated_payload():
    with pytest.raises(DecodeError, match="truncated"):
        read_pgm(b"P5 2 2 255\n" + bytes([0, 64, 128]))


@pytest.mark.parametrize("data", [b"P6 1 1 255\n\x00", b"", b"P5 2 x 255\n\x00\x00", b"P5 0 2 255\n"])
def test_malformed_headers(data):
    with pytest.raises(DecodeError):
        read_pgm(data)


def test_comment_inside_header():
    img = read_pgm(b"P5\n# made by hand\n1 # width done\n1\n255\n\x07")
    assert img.pixels.tolist() == [[7]]


def test_sixteen_bit_rescaled():
    payload = b"".join(v.to_bytes(2, "big") for v in (0, 1000, 65535))
    img = read_pgm(b"P5 3 1 65535\n" + payload)
    assert img.pixels.tolist() == [[0, 1000 * 255 // 65535, 255]]


@pytest.mark.parametrize("pixels", [[[0]], [[0, 64], [128, 255]]])
def test_write_round_trip(pixels):
    img = RasterImage(np.array(pixels, dtype=np.uint8))
    data = write_pgm(img)
    assert data.startswith(b"P5")
    assert read_pgm(data) == img


@given(images)
def test_round_trip_property(px):
    img = RasterImage(px)
    data = write_pgm(img)
    assert read_pgm(data) == img
    assert write_pgm(read_pgm(data)) == data


# -- Otsu ------------------------------------------------------------------------

def test_otsu_bimodal():
    px = np.full((4, 8), 10, dtype=np.uint8)
    px[:, 4:] = 200
    thr = threshold_otsu(RasterImage(px))
    assert not thr.degenerate
    assert np.array_equal(thr.mask, px == 200)
    assert thr.level == 10  # smallest of the tied thresholds 10..199


def test_otsu_constant_is_degenerate():
    thr = threshold_otsu(RasterImage(np.full((5, 5), 7, dtype=np.uint8)))
    assert thr.degenerate and thr.level is None and not thr.mask.any()


def test_otsu_matches_sweep_on_random_image():
    rng = np.random.default_rng(11)
    px = rng.integers(0, 256, (16, 16), dtype=np.uint8)
    assert otsu_level(RasterImage(px)) == brute_otsu(px)


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, (6, 6), elements=st.integers(0, 12)))
def test_otsu_matches_sweep_with_ties(px):
    assert otsu_level(RasterImage(px)) == brute_otsu(px)


# -- Morphology ------------------------------------------------------------------

def test_erode_block_to_center():
    m = np.ones((3, 3), dtype=bool)
    assert erode(m, square_se(3)).tolist() == [[False] * 3, [False, True, False], [False] * 3]


def test_erode_empty():
    assert not erode(np.zeros((5, 5), dtype=bool)).any()


def test_erode_matches_naive_random():
    rng = np.random.default_rng(5)
    m = rng.random((32, 32)) < 0.7
    assert np.array_equal(erode(m, square_se(3)), naive_erode(m, square_se(3)))


def test_erode_cross_element():
    rng = np.random.default_rng(6)
    se = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
    m = rng.random((20, 20)) < 0.6
    assert np.array_equal(erode(m, se), naive_erode(m, se))


def test_open_removes_isolated_pixel():
    m = np.zeros((7, 7), dtype=bool)
    m[3, 3] = True
    assert not open_mask(m, square_se(3)).any()


def test_open_keeps_large_block():
    m = np.zeros((14, 14), dtype=bool)
    m[2:12, 2:12] = True
    assert np.array_equal(open_mask(m, square_se(3)), m)


def test_dilate_single_pixel():
    m = np.zeros((5, 5), dtype=bool)
    m[2, 2] = True
    assert dilate(m).sum() == 9


@given(masks)
def test_morphology_laws(m):
    se = square_se(3)
    e, o = erode(m, se), open_mask(m, se)
    assert not (e & ~m).any()
    assert not (o & ~m).any()
    assert np.array_equal(open_mask(o, se), o)


@pytest.mark.parametrize("se", [np.zeros((3, 3), bool), np.ones((2, 2), bool)])
def test_bad_structuring_element(se):
    with pytest.raises(ValueError):
        erode(np.ones((4, 4), bool), se)


# -- Labeling ----------------------------------------------------------------------

def test_two_blocks():
    m = np.zeros((6, 6), dtype=bool)
    m[0:2, 0:2] = True
    m[4:6, 3:5] = True
    lm = connected_components(m)
    assert lm.count == 2 and lm.component_areas == {1: 4, 2: 4}


def test_empty_labels():
    assert connected_components(np.zeros((4, 4), bool)).count == 0


def test_diagonal_touch_is_one_component():
    m = np.zeros((3, 3), dtype=bool)
    m[0, 0] = m[1, 1] = True
    assert connected_components(m).count == 1


def test_labels_in_raster_discovery_order():
    m = np.zeros((6, 6), dtype=bool)
    m[3:6, 0] = True  # discovered second
    m[0, 5] = True  # discovered first
    lm = connected_components(m)
    assert lm.labels[0, 5] == 1 and lm.labels[4, 0] == 2


@settings(max_examples=40)
@given(masks)
def test_labels_contiguous_and_consistent(m):
    lm = connected_components(m)
    used = set(np.unique(lm.labels)) - {0}
    assert used == set(range(1, lm.count + 1))
    for k, area in lm.component_areas.items():
        assert int((lm.labels == k).sum()) == area
    assert lm.count == flood_fill_count(m)


def test_largest_component_selection():
    m = np.zeros((10, 10), dtype=bool)
    m[0:2, 0:2] = True  # area 4
    m[5:8, 5:8] = True  # area 9
    got = largest_component(connected_components(m), min_area=5)
    assert got.sum() == 9 and got[6, 6]


def test_largest_component_tie_takes_first_label():
    m = np.zeros((10, 10), dtype=bool)
    m[0:3, 0:3] = True
    m[6:9, 6:9] = True
    assert largest_component(connected_components(m), min_area=1)[0, 0]


def test_largest_component_below_min_area():
    m = np.zeros((5, 5), dtype=bool)
    m[0, 0] = True
    with pytest.raises(DetectionError):
        largest_component(connected_components(m), min_area=5)


# -- Sobel -------------------------------------------------------------------------

def test_sobel_constant_mask_has_no_interior_edges():
    edges = sobel_edges(np.ones((8, 8), dtype=bool))
    assert not edges[1:-1, 1:-1].any()


def test_sobel_half_plane():
    m = np.zeros((6, 10), dtype=bool)
    m[:, 5:] = True
    edges = sobel_edges(m)
    expected = np.zeros_like(m)
    expected[:, 5] = True
    assert np.array_equal(edges, expected)


def test_sobel_disk_ring_matches_boundary_scan():
    d = rasterized_disk(30)
    edges = sobel_edges(d)
    ring = {(int(y), int(x)) for y, x in zip(*np.nonzero(edges))}
    assert ring == boundary_by_scan(d, connectivity=8)
    # a 4-connected digital circle has about 8 r pixels, not 2 pi r
    assert abs(len(ring) - 8 * 30) <= 0.05 * 8 * 30


@settings(max_examples=40)
@given(masks)
def test_sobel_edges_touch_background(m):
    edges = sobel_edges(m)
    assert not (edges & ~m).any()
    h, w = m.shape
    padded = np.pad(m, 1, constant_values=False)
    for y, x in zip(*np.nonzero(edges)):
        window = padded[y : y + 3, x : x + 3]
        on_border = y in (0, h - 1) or x in (0, w - 1)
        assert on_border or not window.all()
