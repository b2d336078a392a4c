import pytest

from gapeval.errors import ValidationError
from gapeval.interchange import JudgeScores, QualityScore
from gapeval.judge_metric import aggregate_judge


def vlm(g, f, vid="v1"):
    return JudgeScores(vid, g, f, "VLM")


def human(g, f, annotator, vid="v1"):
    return JudgeScores(vid, g, f, "Human", annotator_id=annotator)


def test_vlm_average():
    agg = aggregate_judge([vlm(4, 3)])
    assert agg.vlm_avg == 3.5
    assert agg.human_avg is None
    assert agg.quality is None


def test_human_average_over_annotators():
    agg = aggregate_judge([human(5, 5, "a1"), human(3, 3, "a2")])
    assert agg.human_avg == 4.0
    assert agg.vlm_avg is None


def test_mixed_sources():
    agg = aggregate_judge([vlm(4, 4), human(2, 4, "a1")],
                          quality=QualityScore("v1", 3.7))
    assert agg.vlm_avg == 4.0
    assert agg.human_avg == 3.0
    assert agg.quality == 3.7


def test_annotator_permutation_invariant():
    entries = [human(5, 4, "a1"), human(2, 1, "a2"), human(3, 3, "a3")]
    fwd = aggregate_judge(entries)
    rev = aggregate_judge(entries[::-1])
    assert fwd.human_avg == rev.human_avg


def test_duplicate_vlm_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        aggregate_judge([vlm(4, 4), vlm(5, 5)])


def test_require_vlm():
    with pytest.raises(ValidationError, match="no VLM"):
        aggregate_judge([human(3, 3, "a1")], require_vlm=True)


def test_mixed_video_ids_rejected():
    with pytest.raises(ValidationError, match="multiple videos"):
        aggregate_judge([vlm(4, 4, "v1"), human(3, 3, "a", vid="v2")])


def test_quality_id_must_match():
    with pytest.raises(ValidationError):
        aggregate_judge([vlm(4, 4, "v1")], quality=QualityScore("v9", 2.0))


def test_absent_never_zero():
    agg = aggregate_judge([vlm(0, 0)])
    assert agg.vlm_avg == 0.0       # a real zero score stays zero
    assert agg.human_avg is None    # absence stays absent
