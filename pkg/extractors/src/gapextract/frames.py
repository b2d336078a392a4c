"""Uniform frame sampling from a video file or a pre-extracted frame
directory. First and last frames are always included; a single requested
frame takes the middle one."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


def frame_indices(total: int, n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"need at least one frame, got n={n}")
    if total < n:
        raise ValueError(f"video has {total} frames, need at least {n}")
    if n == 1:
        return [(total - 1) // 2]
    return [i * (total - 1) // (n - 1) for i in range(n)]


def _read_directory(source: Path) -> list[Path]:
    files = sorted(p for p in source.iterdir()
                   if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise ValueError(f"no frame images in {source}")
    return files


def _read_video(source: Path, wanted: set[int] | None = None):
    import cv2

    cap = cv2.VideoCapture(str(source))
    if not cap.isOpened():
        raise ValueError(f"cannot decode video {source}")
    frames = {}
    index = 0
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        if wanted is None or index in wanted:
            frames[index] = frame[:, :, ::-1]  # BGR -> RGB
        index += 1
    cap.release()
    return index, frames


def sample_frames(source: str | Path, n: int, out_dir: str | Path,
                  attraction_id: str) -> list[Path]:
    """Writes `<id>.f<k>.png` into out_dir and returns the paths."""
    source = Path(source)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if source.is_dir():
        files = _read_directory(source)
        indices = frame_indices(len(files), n)
        images = [Image.open(files[i]).convert("RGB") for i in indices]
    else:
        # Frame counts reported by container metadata are unreliable for
        # some codecs; count by decoding, then pull the wanted indices.
        total, _ = _read_video(source)
        indices = frame_indices(total, n)
        _, frames = _read_video(source, wanted=set(indices))
        images = [Image.fromarray(np.ascontiguousarray(frames[i]))
                  for i in indices]

    out_paths = []
    for k, image in enumerate(images):
        path = out_dir / f"{attraction_id}.f{k}.png"
        image.save(path)
        out_paths.append(path)
    return out_paths
