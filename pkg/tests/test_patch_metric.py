import math

import numpy as np
import pytest

from gapeval.errors import ContractError
from gapeval.interchange import PatchEmbeddings
from gapeval.patch_metric import (
    directional_terms,
    patch_similarity,
    video_patch_score,
)


def emb(rows, grid=None):
    mat = np.asarray(rows, dtype=np.float64)
    mat = mat / np.linalg.norm(mat, axis=1, keepdims=True)
    return PatchEmbeddings(tokens=mat, grid=grid or (1, mat.shape[0]))


def random_emb(rng, n, d):
    return emb(rng.normal(size=(n, d)))


def oracle(gt, frame):
    """Exhaustive double loop straight off the definition."""
    fwd = np.mean([max(float(np.dot(a, b)) for b in frame.tokens)
                   for a in gt.tokens])
    bwd = np.mean([max(float(np.dot(b, a)) for a in gt.tokens)
                   for b in frame.tokens])
    return 0.5 * (fwd + bwd)


def test_identity_orthonormal():
    e = emb([[1.0, 0.0], [0.0, 1.0]])
    assert patch_similarity(e, e) == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_sets():
    assert patch_similarity(emb([[1.0, 0.0]]), emb([[0.0, 1.0]])) == 0.0


def test_partial_overlap_value():
    gt = emb([[1.0, 0.0]])
    frame = emb([[1.0, 0.0], [1.0, 1.0]])
    assert patch_similarity(gt, frame) == pytest.approx(
        0.9267766952966369, abs=1e-12)


def test_symmetry_exact():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = random_emb(rng, int(rng.integers(1, 9)), 5)
        b = random_emb(rng, int(rng.integers(1, 9)), 5)
        assert patch_similarity(a, b) == patch_similarity(b, a)


def test_self_similarity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_emb(rng, int(rng.integers(1, 12)), int(rng.integers(2, 9)))
        assert patch_similarity(a, a) == pytest.approx(1.0, abs=1e-6)


def test_forward_term_monotone_under_superset():
    rng = np.random.default_rng(4)
    for _ in range(20):
        gt = random_emb(rng, 5, 6)
        frame = random_emb(rng, 4, 6)
        fwd_before, _ = directional_terms(gt, frame)
        bigger = PatchEmbeddings(
            tokens=np.vstack([frame.tokens, gt.tokens[:1]]), grid=(1, 5))
        fwd_after, _ = directional_terms(gt, bigger)
        assert fwd_after >= fwd_before - 1e-12


def test_matches_exhaustive_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = random_emb(rng, int(rng.integers(1, 9)), int(rng.integers(1, 17)))
        b = PatchEmbeddings(
            tokens=emb(rng.normal(size=(int(rng.integers(1, 9)),
                                        a.dim))).tokens,
            grid=(1, 1))
        b = PatchEmbeddings(tokens=b.tokens, grid=(1, b.tokens.shape[0]))
        assert patch_similarity(a, b) == pytest.approx(oracle(a, b), abs=1e-9)


def test_negative_values_not_clipped():
    gt = emb([[1.0, 0.0]])
    frame = emb([[-1.0, 0.0]])
    assert patch_similarity(gt, frame) == -1.0


def test_dim_mismatch():
    with pytest.raises(ContractError, match="dim"):
        patch_similarity(emb([[1.0, 0.0]]), emb([[1.0, 0.0, 0.0]]))


def test_video_score_mean():
    assert video_patch_score([1.0] * 5).video == 1.0
    assert video_patch_score([0.2, 0.4, 0.6, 0.8, 1.0]).video == pytest.approx(0.6)
    assert video_patch_score([0.5]).video == 0.5


def test_video_score_preserves_frames():
    score = video_patch_score([0.1, 0.9])
    assert score.per_frame == (0.1, 0.9)
    assert score.video == pytest.approx(np.mean(score.per_frame), abs=1e-9)


def test_video_score_empty():
    with pytest.raises(ContractError):
        video_patch_score([])
