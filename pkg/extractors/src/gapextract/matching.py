"""Dense keypoint correspondence extraction.

The builtin backend tracks corner patches from the reference image into
the frame by normalized cross-correlation: detector-free on the frame
side, fully deterministic, and exact on self-matching. The loftr adapter
wraps the learned matcher in outdoor mode when kornia is installed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .backends import register
from .formats import load_rgb, luminance, write_matches


class CornerNccMatcher:
    def __init__(self, max_corners: int = 300, patch_size: int = 11,
                 min_confidence: float = 0.5, search_window: int = 96):
        if patch_size % 2 == 0:
            raise ValueError("patch_size must be odd")
        self.max_corners = max_corners
        self.patch_size = patch_size
        self.min_confidence = min_confidence
        self.search_window = search_window

    def _gray8(self, path: Path) -> np.ndarray:
        return np.clip(luminance(load_rgb(path)), 0, 255).astype(np.uint8)

    def match(self, gt_image: Path, frame_image: Path
              ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        import cv2

        gt = self._gray8(gt_image)
        frame = self._gray8(frame_image)
        half = self.patch_size // 2

        corners = cv2.goodFeaturesToTrack(
            gt, maxCorners=self.max_corners, qualityLevel=0.01,
            minDistance=max(3, half))
        if corners is None:
            return (np.empty((0, 2)), np.empty((0, 2)), np.empty(0))

        gt_pts, fr_pts, confs = [], [], []
        fh, fw = frame.shape
        sx, sy = fw / gt.shape[1], fh / gt.shape[0]
        for x, y in corners.reshape(-1, 2):
            xi, yi = int(round(x)), int(round(y))
            if not (half <= xi < gt.shape[1] - half
                    and half <= yi < gt.shape[0] - half):
                continue
            template = gt[yi - half:yi + half + 1, xi - half:xi + half + 1]
            if template.std() < 1e-6:
                continue
            # search around the aspect-scaled expected position
            cx, cy = xi * sx, yi * sy
            win = self.search_window
            x0 = int(max(0, cx - win))
            y0 = int(max(0, cy - win))
            x1 = int(min(fw, cx + win + 1))
            y1 = int(min(fh, cy + win + 1))
            region = frame[y0:y1, x0:x1]
            if region.shape[0] < self.patch_size \
                    or region.shape[1] < self.patch_size:
                continue
            scores = cv2.matchTemplate(region, template,
                                       cv2.TM_CCOEFF_NORMED)
            _, best, _, loc = cv2.minMaxLoc(scores)
            if best < self.min_confidence:
                continue
            gt_pts.append((float(x), float(y)))
            fr_pts.append((float(x0 + loc[0] + half),
                           float(y0 + loc[1] + half)))
            confs.append(min(1.0, max(0.0, float(best))))
        return (np.asarray(gt_pts).reshape(-1, 2),
                np.asarray(fr_pts).reshape(-1, 2), np.asarray(confs))


class LoftrMatcher:
    """Adapter over the detector-free learned matcher (optional), outdoor
    weights: suited to large-scale scene and landmark imagery."""

    def __init__(self, device: str = "cpu", min_confidence: float = 0.5):
        import kornia.feature
        import torch

        self._torch = torch
        self.matcher = kornia.feature.LoFTR(pretrained="outdoor").to(device)
        self.device = device
        self.min_confidence = min_confidence

    def _tensor(self, path: Path):
        gray = luminance(load_rgb(path)) / 255.0
        return self._torch.as_tensor(gray, dtype=self._torch.float32,
                                     device=self.device)[None, None]

    def match(self, gt_image: Path, frame_image: Path):
        with self._torch.no_grad():
            out = self.matcher({"image0": self._tensor(gt_image),
                                "image1": self._tensor(frame_image)})
        conf = out["confidence"].cpu().numpy()
        keep = conf >= self.min_confidence
        return (out["keypoints0"].cpu().numpy()[keep],
                out["keypoints1"].cpu().numpy()[keep], conf[keep])


register("match", "corner_ncc")(CornerNccMatcher)
register("match", "loftr")(LoftrMatcher)


def run_match_job(matcher, attraction_id: str, gt_image: Path,
                  frames: list[Path], out_dir: Path) -> list[Path]:
    """Emits `<id>.f<k>.matches` plus the `<id>.self.matches` baseline,
    produced with identical settings."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    gt_pts, fr_pts, conf = matcher.match(gt_image, gt_image)
    path = out_dir / f"{attraction_id}.self.matches"
    write_matches(path, gt_pts, fr_pts, conf)
    written.append(path)
    for k, frame in enumerate(frames):
        gt_pts, fr_pts, conf = matcher.match(gt_image, frame)
        path = out_dir / f"{attraction_id}.f{k}.matches"
        write_matches(path, gt_pts, fr_pts, conf)
        written.append(path)
    return written
