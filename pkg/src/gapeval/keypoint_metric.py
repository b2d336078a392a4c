"""Fine-grained local alignment from dense keypoint correspondences.

Per region of the reference image: a detailness weight from the local
Laplacian-response variance, a match-density score normalized by a
self-matching baseline, and a Procrustes geometry score. Regions combine
area-weighted into a frame score (density + geometry, range [0, 2)), and
the video score is the best frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContractError, DegenerateDataError
from .interchange import MatchSet, RegionMask

# Regions with fewer in-region matches than this (in the frame matching or
# the self-matching baseline) are scored 0 instead of being dropped:
# absence of matches is evidence of misalignment, not missing data.
MIN_REGION_MATCHES = 3

# Floor for the detailness factor in the density normalization; caps the
# amplification applied to near-constant regions at 1000x.
DETAILNESS_FLOOR = 1e-3

_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class RegionEvaluation:
    region_index: int
    detailness: float
    raw_density: float | None      # rho of in-region frame-match keypoints
    ref_density: float | None      # rho of the self-matching baseline
    normalized_density: float | None
    density_score: float           # 0.0 when unusable
    disparity: float | None
    geometry_score: float          # 0.0 when unusable
    usable: bool
    n_matches: int
    n_self_matches: int


@dataclass(frozen=True)
class FrameAlignment:
    density: float
    geometry: float
    total: float
    weights: tuple[float, ...]


@dataclass(frozen=True)
class KeypointVideoScore:
    per_frame: tuple[FrameAlignment, ...]
    video: float
    best_frame: int


def laplacian_variance(gray: np.ndarray, mask: RegionMask,
                       laplacian: np.ndarray | None = None) -> float:
    """Population variance of the Laplacian response over masked pixels.

    `laplacian` short-circuits recomputation when the caller already has
    the full-image response.
    """
    gray = np.asarray(gray, dtype=np.float64)
    if gray.shape != mask.pixels.shape:
        raise ContractError(f"raster shape {gray.shape} does not match mask "
                            f"shape {mask.pixels.shape}")
    if mask.area < 1:
        raise ContractError("mask covers no pixels")
    if laplacian is None:
        laplacian = _kernels.laplacian_response(gray)
    vals = laplacian[mask.pixels]
    mean = vals.mean()
    return float(((vals - mean) ** 2).mean())


def detailness(var: float, tau: float) -> float:
    """Saturating transform of region variance, in [0, 1)."""
    if tau <= 0:
        raise ContractError(f"tau must be > 0, got {tau}")
    if var < 0:
        raise ContractError(f"variance must be >= 0, got {var}")
    return 1.0 - float(np.exp(-var / tau))


def match_density(points: np.ndarray) -> float:
    """Inverse mean distance to the second-closest other point."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < MIN_REGION_MATCHES:
        raise ContractError(f"density needs >= {MIN_REGION_MATCHES} points, "
                            f"got {pts.shape[0]}")
    mean_nn2 = float(_kernels.nn2_distances(pts).mean())
    if mean_nn2 == 0.0:
        raise DegenerateDataError("all points coincide; density undefined")
    return 1.0 / mean_nn2


def normalized_density(rho_f: float, rho_ref: float, d_k: float) -> float:
    """Frame density relative to the self-matching baseline and detailness."""
    if rho_ref <= 0:
        raise DegenerateDataError(f"reference density must be > 0, got {rho_ref}")
    return rho_f / (max(d_k, DETAILNESS_FLOOR) * rho_ref)


def density_score(r: float, beta: float) -> float:
    """Saturating transform of normalized density, in [0, 1)."""
    if beta <= 0:
        raise ContractError(f"beta must be > 0, got {beta}")
    if r < 0:
        raise ContractError(f"normalized density must be >= 0, got {r}")
    return 1.0 - float(np.exp(-r / beta))


def procrustes_disparity(a_points: np.ndarray, b_points: np.ndarray) -> float:
    """Residual misfit after optimal translation, scaling and rotation
    (reflections permitted), in [0, 1].

    Both sets are centered and scaled to unit Frobenius norm; the
    disparity is 1 - (sum of singular values of A'B)^2, the standard
    statistics-package definition.
    """
    a = np.asarray(a_points, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b_points, dtype=np.float64).reshape(-1, 2)
    if a.shape != b.shape:
        raise ContractError("point sets must be paired with equal length")
    if a.shape[0] < 3:
        raise ContractError(f"Procrustes needs >= 3 paired points, got {a.shape[0]}")
    a = a - a.mean(axis=0)
    b = b - b.mean(axis=0)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < _ZERO_NORM or nb < _ZERO_NORM:
        raise DegenerateDataError("point set collapses to a single point")
    a /= na
    b /= nb
    s = float(np.linalg.svd(a.T @ b, compute_uv=False).sum())
    return min(max(1.0 - s * s, 0.0), 1.0)


def region_indices(gt_points: np.ndarray, mask_pixels: np.ndarray) -> np.ndarray:
    """Indices of matches whose rounded, clamped gt pixel lies in the mask."""
    if gt_points.shape[0] == 0:
        return np.empty(0, dtype=np.intp)
    h, w = mask_pixels.shape
    x = np.clip(np.rint(gt_points[:, 0]).astype(np.intp), 0, w - 1)
    y = np.clip(np.rint(gt_points[:, 1]).astype(np.intp), 0, h - 1)
    return np.flatnonzero(mask_pixels[y, x])


def evaluate_region(gt_gray: np.ndarray, mask: RegionMask, matches: MatchSet,
                    self_matches: MatchSet, tau: float, beta: float,
                    region_index: int = 0,
                    laplacian: np.ndarray | None = None) -> RegionEvaluation:
    """Score one region of one frame; failures mark it unusable (D = G = 0)
    rather than aborting the frame."""
    var = laplacian_variance(gt_gray, mask, laplacian=laplacian)
    d_k = detailness(var, tau)

    idx_f = region_indices(matches.gt_points, mask.pixels)
    idx_ref = region_indices(self_matches.gt_points, mask.pixels)

    rho_f = rho_ref = r = disp = None
    d_score = g_score = 0.0
    usable = idx_f.size >= MIN_REGION_MATCHES and idx_ref.size >= MIN_REGION_MATCHES
    if usable:
        try:
            rho_ref = match_density(self_matches.gt_points[idx_ref])
            rho_f = match_density(matches.gt_points[idx_f])
            r = normalized_density(rho_f, rho_ref, d_k)
            disp = procrustes_disparity(matches.gt_points[idx_f],
                                        matches.frame_points[idx_f])
        except DegenerateDataError:
            usable = False
            r = disp = None
        else:
            d_score = density_score(r, beta)
            g_score = 1.0 - disp

    return RegionEvaluation(
        region_index=region_index,
        detailness=d_k,
        raw_density=rho_f,
        ref_density=rho_ref,
        normalized_density=r,
        density_score=d_score,
        disparity=disp,
        geometry_score=g_score,
        usable=usable,
        n_matches=int(idx_f.size),
        n_self_matches=int(idx_ref.size),
    )


def frame_alignment(regions: list[RegionEvaluation],
                    areas: list[int]) -> FrameAlignment:
    """Area-weighted density and geometry over all regions; unusable
    regions stay in the weighting and contribute zero."""
    if not regions:
        raise ContractError("frame alignment requires at least one region")
    if len(regions) != len(areas):
        raise ContractError("one area per region required")
    a = np.asarray(areas, dtype=np.float64)
    if np.any(a <= 0):
        raise ContractError("region areas must be positive")
    w = a / a.sum()
    density = float(np.sum(w * [reg.density_score for reg in regions]))
    geometry = float(np.sum(w * [reg.geometry_score for reg in regions]))
    return FrameAlignment(density=density, geometry=geometry,
                          total=density + geometry,
                          weights=tuple(float(x) for x in w))


def video_alignment(frames: list[FrameAlignment]) -> KeypointVideoScore:
    """Best frame wins; ties resolve to the earliest frame index."""
    if not frames:
        raise ContractError("video alignment requires at least one frame")
    best = 0
    for i, frame in enumerate(frames):
        if frame.total > frames[best].total:
            best = i
    return KeypointVideoScore(per_frame=tuple(frames),
                              video=frames[best].total, best_frame=best)
