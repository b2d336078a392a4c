"""Global structural alignment between a reference image and a frame,
scored by symmetric bidirectional max-matching of unit-norm patch
embeddings. Video level is the mean over sampled frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .interchange import PatchEmbeddings


@dataclass(frozen=True)
class PatchScore:
    per_frame: tuple[float, ...]
    video: float


def directional_terms(gt: PatchEmbeddings, frame: PatchEmbeddings) -> tuple[float, float]:
    """(forward, backward) mean-of-max cosine terms.

    Rows are unit-norm by the loader invariant, so cosine reduces to a
    dot product. The similarity matrix is shared between both directions.
    """
    if len(gt) == 0 or len(frame) == 0:
        raise ContractError("patch similarity requires non-empty token sets")
    if gt.dim != frame.dim:
        raise ContractError(f"embedding dim mismatch: {gt.dim} vs {frame.dim}")
    sims = gt.tokens @ frame.tokens.T
    forward = float(sims.max(axis=1).mean())
    backward = float(sims.max(axis=0).mean())
    return forward, backward


def patch_similarity(gt: PatchEmbeddings, frame: PatchEmbeddings) -> float:
    """Symmetric max-matching score in [-1, 1]."""
    forward, backward = directional_terms(gt, frame)
    return 0.5 * (forward + backward)


def video_patch_score(per_frame: list[float]) -> PatchScore:
    if len(per_frame) == 0:
        raise ContractError("video patch score requires at least one frame")
    return PatchScore(per_frame=tuple(float(v) for v in per_frame),
                      video=float(np.mean(per_frame)))
