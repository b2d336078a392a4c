"""Region masks and luminance rasters.

Masks are 8-bit single-channel image files; any nonzero pixel is inside
the region. Color images are reduced with the conventional luminance
weights (0.299, 0.587, 0.114) and kept real-valued.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DegenerateDataError, FormatError, ValidationError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class RegionMask:
    pixels: np.ndarray   # bool (H, W)
    area: int            # number of set pixels, > 0
    label: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


def _open_image(path: Path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise FormatError(f"{path}: cannot decode image: {exc}") from exc
    return img


def read_mask(path: str | Path, expected_shape: tuple[int, int] | None = None,
              label: str = "") -> RegionMask:
    """expected_shape is the (H, W) of the ground-truth image."""
    path = Path(path)
    img = _open_image(path)
    if img.mode != "L":
        raise FormatError(f"{path}: mask must be 8-bit single-channel, "
                          f"got mode '{img.mode}'")
    arr = np.asarray(img)
    if expected_shape is not None and arr.shape != tuple(expected_shape):
        raise ValidationError(f"{path}: mask shape {arr.shape} does not match "
                              f"ground-truth image shape {tuple(expected_shape)}")
    pixels = arr > 0
    area = int(pixels.sum())
    if area == 0:
        raise DegenerateDataError(f"{path}: zero-area mask")
    pixels.setflags(write=False)
    return RegionMask(pixels=pixels, area=area, label=label)


def write_mask(path: str | Path, pixels: np.ndarray) -> None:
    arr = (np.asarray(pixels).astype(bool) * np.uint8(255))
    Image.fromarray(arr, mode="L").save(path)


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Real-valued luminance of an (H, W, 3) 8-bit array."""
    r, g, b = LUMA_WEIGHTS
    arr = np.asarray(rgb, dtype=np.float64)
    return r * arr[..., 0] + g * arr[..., 1] + b * arr[..., 2]


def read_grayscale(path: str | Path) -> np.ndarray:
    """Load an image as a float64 luminance raster."""
    path = Path(path)
    img = _open_image(path)
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64)
    if img.mode == "RGB":
        return luminance(np.asarray(img))
    raise FormatError(f"{path}: unsupported image mode '{img.mode}' "
                      "(expected 8-bit grayscale or RGB)")


def image_size(path: str | Path) -> tuple[int, int]:
    """(width, height) from the image header."""
    with Image.open(path) as img:
        return img.size
