"""Kernel backend selection.

The compiled extension is preferred when importable; setting the
environment variable ``GAP_KERNELS=python`` forces the NumPy fallback.
Both backends produce bit-identical results (asserted by the test suite),
so the choice only affects speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import np_backend

# Below this many points the exhaustive pairwise scan wins; above it the
# spatial grid does.
NN2_GRID_THRESHOLD = 512

if os.environ.get("GAP_KERNELS", "").lower() == "python":
    _impl = np_backend
    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = np_backend
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def _as_points(pts) -> np.ndarray:
    arr = np.ascontiguousarray(pts, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {arr.shape}")
    return arr


def laplacian_response(gray) -> np.ndarray:
    arr = np.ascontiguousarray(gray, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d raster")
    return np.asarray(_impl.laplacian_response(arr))


def nn2_exhaustive(pts) -> np.ndarray:
    return np.asarray(_impl.nn2_exhaustive(_as_points(pts)))


def nn2_grid(pts) -> np.ndarray:
    return np.asarray(_impl.nn2_grid(_as_points(pts)))


def nn2_distances(pts) -> np.ndarray:
    """Per-point distance to the second-closest other point."""
    arr = _as_points(pts)
    if arr.shape[0] < NN2_GRID_THRESHOLD:
        return np.asarray(_impl.nn2_exhaustive(arr))
    return np.asarray(_impl.nn2_grid(arr))
