"""Video-level aggregation of externally produced judge and quality scores."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .interchange import JudgeScores, QualityScore


@dataclass(frozen=True)
class AggregatedJudgeScore:
    video_id: str
    vlm_avg: float | None
    human_avg: float | None
    quality: float | None


def aggregate_judge(entries: list[JudgeScores],
                    quality: QualityScore | None = None,
                    require_vlm: bool = False) -> AggregatedJudgeScore:
    """Mean of (global + fine)/2: the single VLM entry as-is, human
    annotators averaged uniformly. Missing sources stay absent, never 0."""
    video_ids = {e.video_id for e in entries}
    if len(video_ids) > 1:
        raise ValidationError(f"entries span multiple videos: {sorted(video_ids)}")
    if quality is not None and video_ids and quality.video_id not in video_ids:
        raise ValidationError(
            f"quality entry '{quality.video_id}' does not match judge "
            f"entries '{next(iter(video_ids))}'")
    video_id = next(iter(video_ids)) if video_ids else (
        quality.video_id if quality is not None else "")

    vlm = [e for e in entries if e.source == "VLM"]
    if len(vlm) > 1:
        raise ValidationError(f"duplicate VLM entries for video '{video_id}'")
    if require_vlm and not vlm:
        raise ValidationError(f"no VLM entry for video '{video_id}'")
    vlm_avg = None
    if vlm:
        vlm_avg = (vlm[0].global_alignment + vlm[0].fine_alignment) / 2.0

    humans = [e for e in entries if e.source == "Human"]
    human_avg = None
    if humans:
        per_annotator = [(e.global_alignment + e.fine_alignment) / 2.0
                         for e in humans]
        human_avg = sum(per_annotator) / len(per_annotator)

    return AggregatedJudgeScore(
        video_id=video_id,
        vlm_avg=vlm_avg,
        human_avg=human_avg,
        quality=quality.overall if quality is not None else None,
    )
