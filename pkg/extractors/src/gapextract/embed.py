"""Patch-embedding extraction.

The builtin backend tiles the luminance image into fixed-size patches and
describes each by its 2-D DCT coefficients: cheap, deterministic, and
discriminative enough for geometry-free similarity on synthetic fixtures.
The dinov2 adapter wraps the transformer encoder when it is installed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .backends import register
from .formats import load_rgb, luminance, write_embeddings


class DctPatchEmbedder:
    """Per-patch DCT-II descriptors over the luminance channel."""

    def __init__(self, patch_size: int = 8, coeffs: int = 8):
        self.patch_size = patch_size
        self.coeffs = min(coeffs, patch_size)

    def embed(self, image_path: Path) -> tuple[np.ndarray, tuple[int, int]]:
        from scipy.fft import dctn

        gray = luminance(load_rgb(image_path))
        p = self.patch_size
        rows, cols = gray.shape[0] // p, gray.shape[1] // p
        if rows < 1 or cols < 1:
            raise ValueError(
                f"{image_path}: image smaller than one {p}x{p} patch")
        # center-crop to a whole number of patches
        y0 = (gray.shape[0] - rows * p) // 2
        x0 = (gray.shape[1] - cols * p) // 2
        gray = gray[y0:y0 + rows * p, x0:x0 + cols * p]

        k = self.coeffs
        tokens = np.empty((rows * cols, k * k))
        for r in range(rows):
            for c in range(cols):
                patch = gray[r * p:(r + 1) * p, c * p:(c + 1) * p]
                spectrum = dctn(patch, norm="ortho")[:k, :k]
                tokens[r * cols + c] = spectrum.ravel()
        norms = np.linalg.norm(tokens, axis=1, keepdims=True)
        flat = (norms < 1e-12).ravel()
        if np.any(flat):
            # constant patches carry no structure; give them a fixed basis
            tokens[flat] = 0.0
            tokens[flat, 0] = 1.0
            norms[flat] = 1.0
        return tokens / norms, (rows, cols)


class Dinov2Embedder:
    """Adapter over a pretrained ViT patch encoder (optional dependency)."""

    def __init__(self, model_name: str = "facebook/dinov2-large",
                 device: str = "cpu"):
        import torch
        from transformers import AutoImageProcessor, AutoModel

        self._torch = torch
        self.processor = AutoImageProcessor.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name).to(device).eval()
        self.device = device

    def embed(self, image_path: Path) -> tuple[np.ndarray, tuple[int, int]]:
        from PIL import Image

        with Image.open(image_path) as img:
            inputs = self.processor(images=img.convert("RGB"),
                                    return_tensors="pt").to(self.device)
        with self._torch.no_grad():
            out = self.model(**inputs)
        tokens = out.last_hidden_state[0, 1:].cpu().numpy()  # drop CLS
        side = int(round(len(tokens) ** 0.5))
        tokens = tokens / np.linalg.norm(tokens, axis=1, keepdims=True)
        return tokens.astype(np.float64), (side, len(tokens) // side)


register("embed", "dct")(DctPatchEmbedder)
register("embed", "dinov2")(Dinov2Embedder)


def run_embed_job(embedder, attraction_id: str, gt_image: Path,
                  frames: list[Path], out_dir: Path) -> list[Path]:
    """Emits `<id>.gt.emb` and `<id>.f<k>.emb`."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    tokens, grid = embedder.embed(gt_image)
    path = out_dir / f"{attraction_id}.gt.emb"
    write_embeddings(path, tokens, grid)
    written.append(path)
    for k, frame in enumerate(frames):
        tokens, grid = embedder.embed(frame)
        path = out_dir / f"{attraction_id}.f{k}.emb"
        write_embeddings(path, tokens, grid)
        written.append(path)
    return written
