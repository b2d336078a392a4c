"""Dense keypoint correspondences: plain text, one match per line,
`x_gt y_gt x_f y_f conf` separated by whitespace."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError, ValidationError


@dataclass(frozen=True)
class MatchSet:
    gt_points: np.ndarray       # (n, 2) float64, x then y
    frame_points: np.ndarray    # (n, 2) float64
    confidences: np.ndarray     # (n,) float64 in [0, 1]
    gt_ref: Path | None = None
    frame_ref: Path | None = None

    def __len__(self) -> int:
        return self.gt_points.shape[0]


def _check_bounds(points: np.ndarray, size: tuple[int, int],
                  path: Path, which: str) -> None:
    w, h = size
    x, y = points[:, 0], points[:, 1]
    bad = np.flatnonzero((x < 0) | (x >= w) | (y < 0) | (y >= h))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"{path}: {which} keypoint {tuple(points[i])} on line {i + 1} "
            f"outside image bounds {w}x{h}")


def read_matches(path: str | Path,
                 gt_size: tuple[int, int] | None = None,
                 frame_size: tuple[int, int] | None = None,
                 gt_ref: Path | None = None,
                 frame_ref: Path | None = None) -> MatchSet:
    """Sizes are (width, height); bounds are checked only when given."""
    path = Path(path)
    gt_pts, fr_pts, confs = [], [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FormatError(f"{path}:{lineno}: expected 5 fields, "
                              f"got {len(parts)}")
        try:
            xg, yg, xf, yf, c = (float(p) for p in parts)
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: non-numeric field: {exc}") from exc
        if not all(np.isfinite([xg, yg, xf, yf, c])):
            raise FormatError(f"{path}:{lineno}: non-finite value")
        if not 0.0 <= c <= 1.0:
            raise ValidationError(f"{path}:{lineno}: confidence {c} "
                                  "outside [0, 1]")
        gt_pts.append((xg, yg))
        fr_pts.append((xf, yf))
        confs.append(c)
    gt_arr = np.array(gt_pts, dtype=np.float64).reshape(-1, 2)
    fr_arr = np.array(fr_pts, dtype=np.float64).reshape(-1, 2)
    conf_arr = np.array(confs, dtype=np.float64)
    if gt_size is not None:
        _check_bounds(gt_arr, gt_size, path, "ground-truth")
    if frame_size is not None:
        _check_bounds(fr_arr, frame_size, path, "frame")
    for arr in (gt_arr, fr_arr, conf_arr):
        arr.setflags(write=False)
    return MatchSet(gt_points=gt_arr, frame_points=fr_arr,
                    confidences=conf_arr, gt_ref=gt_ref, frame_ref=frame_ref)


def write_matches(path: str | Path, gt_points, frame_points,
                  confidences) -> None:
    gt = np.asarray(gt_points, dtype=np.float64).reshape(-1, 2)
    fr = np.asarray(frame_points, dtype=np.float64).reshape(-1, 2)
    conf = np.asarray(confidences, dtype=np.float64).reshape(-1)
    if not (len(gt) == len(fr) == len(conf)):
        raise ValueError("point and confidence arrays must have equal length")
    lines = [
        f"{gx!r} {gy!r} {fx!r} {fy!r} {c!r}"
        for (gx, gy), (fx, fy), c in zip(gt.tolist(), fr.tolist(), conf.tolist())
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
