"""Patch-embedding interchange file.

Layout (little-endian): magic ``b"GAPE"``, then four u32 fields
(num_patches, dim, grid rows, grid cols), then num_patches*dim float32
values, row-major. Rows are re-normalized to unit L2 norm on load so
downstream cosine similarity is a plain dot product.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DegenerateDataError, FormatError

MAGIC = b"GAPE"
_HEADER = struct.Struct("<4sIIII")

# Rows whose norm falls below this cannot be meaningfully normalized.
_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class PatchEmbeddings:
    tokens: np.ndarray          # (num_patches, dim) float64, unit-norm rows
    grid: tuple[int, int]       # (rows, cols), rows*cols == num_patches
    source: Path | None = None

    def __len__(self) -> int:
        return self.tokens.shape[0]

    @property
    def dim(self) -> int:
        return self.tokens.shape[1]


def read_embeddings(path: str | Path) -> PatchEmbeddings:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, n, d, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if n < 1 or d < 1:
        raise FormatError(f"{path}: header requires num_patches>=1 and dim>=1 "
                          f"(got {n}, {d})")
    if rows * cols != n:
        raise FormatError(f"{path}: grid {rows}x{cols} inconsistent with "
                          f"{n} patches")
    payload = blob[_HEADER.size:]
    expected = n * d * 4
    if len(payload) != expected:
        raise FormatError(f"{path}: header claims {n}x{d} values "
                          f"({expected} bytes), payload has {len(payload)}")
    tokens = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(n, d)
    if not np.all(np.isfinite(tokens)):
        raise FormatError(f"{path}: non-finite embedding values")
    norms = np.linalg.norm(tokens, axis=1)
    bad = np.flatnonzero(norms < _ZERO_NORM)
    if bad.size:
        raise DegenerateDataError(f"{path}: zero-norm embedding row {bad[0]}")
    tokens /= norms[:, None]
    tokens.setflags(write=False)
    return PatchEmbeddings(tokens=tokens, grid=(rows, cols), source=path)


def write_embeddings(path: str | Path, tokens: np.ndarray,
                     grid: tuple[int, int]) -> None:
    tokens = np.asarray(tokens, dtype=np.float64)
    if tokens.ndim != 2:
        raise ValueError("tokens must be a 2-d matrix")
    n, d = tokens.shape
    rows, cols = grid
    if rows * cols != n:
        raise ValueError(f"grid {rows}x{cols} inconsistent with {n} rows")
    header = _HEADER.pack(MAGIC, n, d, rows, cols)
    Path(path).write_bytes(header + tokens.astype("<f4").tobytes())
