"""Landmark-relevant region detection emitting binary masks.

The builtin backend has no notion of language: it marks high-contrast
connected structure, which is what distinguishes built landmarks from sky
and haze in practice. The grounded_sam adapter accepts detection phrases
(the attraction's category plus a fixed vocabulary) when the models are
installed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .backends import register
from .formats import load_rgb, luminance, write_mask

# Phrase set used by text-conditioned detectors; the confidence threshold
# and the cap of 8 regions apply to every backend.
DETECTION_PHRASES = ("building", "tower", "monument", "bridge", "statue",
                     "mountain", "facade")
CONFIDENCE_THRESHOLD = 0.3
MAX_REGIONS = 8


class ContrastRegionDetector:
    """Threshold the smoothed Laplacian magnitude, keep large components."""

    def __init__(self, percentile: float = 75.0, smooth: int = 5,
                 min_area_fraction: float = 0.01):
        self.percentile = percentile
        self.smooth = smooth
        self.min_area_fraction = min_area_fraction

    def detect(self, image_path: Path,
               phrases: tuple[str, ...] = ()) -> list[np.ndarray]:
        from scipy import ndimage

        gray = luminance(load_rgb(image_path))
        pad = np.pad(gray, 1, mode="edge")
        lap = np.abs(pad[:-2, 1:-1] + pad[2:, 1:-1] + pad[1:-1, :-2]
                     + pad[1:-1, 2:] - 4.0 * pad[1:-1, 1:-1])
        energy = ndimage.uniform_filter(lap, size=self.smooth)
        peak = float(energy.max())
        if peak <= 0:
            return []
        # Percentile alone collapses on mostly-flat images where edges
        # occupy few pixels; the max-relative floor keeps them.
        cutoff = max(float(np.percentile(energy, self.percentile)),
                     0.1 * peak)
        binary = ndimage.binary_fill_holes(energy > cutoff)
        labels, count = ndimage.label(binary)
        if count == 0:
            return []
        areas = ndimage.sum_labels(binary, labels, index=range(1, count + 1))
        min_area = self.min_area_fraction * gray.size
        keep = [(int(a), i + 1) for i, a in enumerate(areas) if a >= min_area]
        keep.sort(key=lambda t: (-t[0], t[1]))
        return [labels == idx for _, idx in keep[:MAX_REGIONS]]


class GroundedSamDetector:
    """Adapter over text-conditioned detection + segmentation (optional)."""

    def __init__(self, detector_name: str = "IDEA-Research/grounding-dino-base",
                 segmenter_name: str = "facebook/sam-vit-huge",
                 device: str = "cpu"):
        import torch  # noqa: F401  (validates availability up front)
        from transformers import pipeline

        self.detector = pipeline("zero-shot-object-detection",
                                 model=detector_name, device=device)
        self.segmenter = pipeline("mask-generation", model=segmenter_name,
                                  device=device)
        self.device = device

    def detect(self, image_path: Path,
               phrases: tuple[str, ...] = DETECTION_PHRASES) -> list[np.ndarray]:
        from PIL import Image

        with Image.open(image_path) as img:
            rgb = img.convert("RGB")
            detections = self.detector(rgb, candidate_labels=list(phrases))
            masks = []
            for det in detections:
                if det["score"] < CONFIDENCE_THRESHOLD:
                    continue
                box = det["box"]
                out = self.segmenter(rgb, points_per_batch=16,
                                     input_boxes=[[box["xmin"], box["ymin"],
                                                   box["xmax"], box["ymax"]]])
                masks.extend(np.asarray(m, dtype=bool)
                             for m in out.get("masks", []))
        masks = [m for m in masks if m.any()]
        masks.sort(key=lambda m: -int(m.sum()))
        return masks[:MAX_REGIONS]


register("regions", "contrast")(ContrastRegionDetector)
register("regions", "grounded_sam")(GroundedSamDetector)


def run_region_job(detector, attraction_id: str, gt_image: Path,
                   out_dir: Path, phrases: tuple[str, ...] = ()) -> list[Path]:
    """Emits `<id>.r<k>.mask.png`, largest area first. Zero detections
    emit nothing; the engine falls back to a full-image region."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for k, mask in enumerate(detector.detect(gt_image, phrases=phrases)):
        path = out_dir / f"{attraction_id}.r{k}.mask.png"
        write_mask(path, mask)
        written.append(path)
    return written
