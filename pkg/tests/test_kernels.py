"""The compiled and NumPy kernel backends must agree bit for bit, as must
the exhaustive and grid NN2 paths within each backend."""

import numpy as np
import pytest

from gapeval import _kernels
from gapeval._kernels import np_backend

try:
    from gapeval._kernels import _ckern
except ImportError:
    _ckern = None


def point_clouds():
    rng = np.random.default_rng(99)
    yield rng.uniform(0, 100, (3, 2))
    yield rng.uniform(0, 1, (50, 2))
    yield rng.uniform(-500, 500, (700, 2))          # above grid threshold
    yield rng.normal(0, 1e-3, (64, 2))              # tight cluster
    yield np.column_stack([rng.uniform(0, 9, 40), np.zeros(40)])  # collinear
    pts = rng.uniform(0, 10, (30, 2))
    yield np.vstack([pts, pts[:7]])                 # duplicates
    yield np.full((5, 2), 3.25)                     # all identical


@pytest.mark.parametrize("pts", list(point_clouds()), ids=lambda p: str(p.shape))
def test_grid_matches_exhaustive_bitwise(pts):
    ex = _kernels.nn2_exhaustive(pts)
    gr = _kernels.nn2_grid(pts)
    assert np.array_equal(ex, gr)


@pytest.mark.parametrize("pts", list(point_clouds()), ids=lambda p: str(p.shape))
def test_backends_agree_bitwise(pts):
    if _ckern is None:
        pytest.skip("compiled backend unavailable")
    assert np.array_equal(np.asarray(_ckern.nn2_exhaustive(pts)),
                          np_backend.nn2_exhaustive(pts))
    assert np.array_equal(np.asarray(_ckern.nn2_grid(pts)),
                          np_backend.nn2_grid(pts))


def test_laplacian_backends_agree_bitwise():
    if _ckern is None:
        pytest.skip("compiled backend unavailable")
    rng = np.random.default_rng(5)
    for shape in ((1, 1), (1, 7), (5, 1), (13, 17), (64, 48)):
        img = np.ascontiguousarray(rng.uniform(0, 255, shape))
        assert np.array_equal(np.asarray(_ckern.laplacian_response(img)),
                              np_backend.laplacian_response(img))


def test_laplacian_replicate_padding():
    # A 1x1 image has itself as every neighbor: response is 0.
    assert _kernels.laplacian_response(np.array([[7.0]]))[0, 0] == 0.0
    # Hand case: a single bright pixel in the middle of a 3x3.
    img = np.zeros((3, 3))
    img[1, 1] = 1.0
    lap = _kernels.laplacian_response(img)
    assert lap[1, 1] == -4.0
    assert lap[0, 1] == lap[1, 0] == lap[1, 2] == lap[2, 1] == 1.0
    # Corner (0,0): up and left replicate the corner itself.
    assert lap[0, 0] == 0.0


def test_laplacian_against_nested_loop_oracle():
    rng = np.random.default_rng(11)
    img = rng.uniform(0, 255, (9, 12))
    h, w = img.shape

    def px(i, j):
        return img[min(max(i, 0), h - 1), min(max(j, 0), w - 1)]

    expected = np.empty_like(img)
    for i in range(h):
        for j in range(w):
            expected[i, j] = (px(i - 1, j) + px(i + 1, j) + px(i, j - 1)
                              + px(i, j + 1) - 4.0 * px(i, j))
    assert np.array_equal(_kernels.laplacian_response(img), expected)


def test_nn2_against_sorted_distance_oracle():
    rng = np.random.default_rng(21)
    pts = rng.uniform(0, 10, (25, 2))
    expected = []
    for i in range(len(pts)):
        dists = sorted(np.hypot(*(pts[i] - pts[j])) for j in range(len(pts))
                       if j != i)
        expected.append(dists[1])
    np.testing.assert_allclose(_kernels.nn2_distances(pts), expected,
                               rtol=1e-12)


def test_dispatch_threshold_consistent():
    rng = np.random.default_rng(31)
    small = rng.uniform(0, 10, (_kernels.NN2_GRID_THRESHOLD - 1, 2))
    large = rng.uniform(0, 10, (_kernels.NN2_GRID_THRESHOLD + 1, 2))
    for pts in (small, large):
        assert np.array_equal(_kernels.nn2_distances(pts),
                              _kernels.nn2_exhaustive(pts))


def test_duplicate_points_keep_zero_distance():
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 4.0]])
    np.testing.assert_array_equal(_kernels.nn2_exhaustive(pts), [5.0, 5.0, 5.0])
    trip = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    np.testing.assert_array_equal(_kernels.nn2_grid(trip), 0.0)
