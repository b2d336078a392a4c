"""Writers for the engine's interchange files.

Deliberately independent of the engine package: the byte layouts below
are the contract, and `gap validate` is the conformance check.

  embeddings  magic b"GAPE", u32 num_patches/dim/rows/cols (LE), f32 payload
  matches     text lines `x_gt y_gt x_f y_f conf`
  masks       8-bit single-channel PNG, nonzero = inside
  scores      JSON arrays of judge / quality objects
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

EMB_MAGIC = b"GAPE"
_EMB_HEADER = struct.Struct("<4sIIII")


def write_embeddings(path: str | Path, tokens: np.ndarray,
                     grid: tuple[int, int]) -> None:
    tokens = np.asarray(tokens, dtype=np.float64)
    n, d = tokens.shape
    rows, cols = grid
    if rows * cols != n:
        raise ValueError(f"grid {rows}x{cols} inconsistent with {n} rows")
    norms = np.linalg.norm(tokens, axis=1, keepdims=True)
    if np.any(norms < 1e-12):
        raise ValueError("zero-norm token row")
    header = _EMB_HEADER.pack(EMB_MAGIC, n, d, rows, cols)
    Path(path).write_bytes(header + (tokens / norms).astype("<f4").tobytes())


def write_matches(path: str | Path, gt_points, frame_points,
                  confidences) -> None:
    gt = np.asarray(gt_points, dtype=np.float64).reshape(-1, 2)
    fr = np.asarray(frame_points, dtype=np.float64).reshape(-1, 2)
    conf = np.asarray(confidences, dtype=np.float64).reshape(-1)
    lines = [
        f"{gx!r} {gy!r} {fx!r} {fy!r} {c!r}"
        for (gx, gy), (fx, fy), c in zip(gt.tolist(), fr.tolist(), conf.tolist())
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def write_mask(path: str | Path, pixels: np.ndarray) -> None:
    arr = np.asarray(pixels).astype(bool).astype(np.uint8) * 255
    Image.fromarray(arr, mode="L").save(path)


def write_judge_scores(path: str | Path, entries: list[dict]) -> None:
    Path(path).write_text(json.dumps(entries, indent=2) + "\n")


def write_quality_scores(path: str | Path, entries: list[dict]) -> None:
    Path(path).write_text(json.dumps(entries, indent=2) + "\n")


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Same fixed weights the engine documents for grayscale reduction."""
    arr = np.asarray(rgb, dtype=np.float64)
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]


def load_rgb(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))
