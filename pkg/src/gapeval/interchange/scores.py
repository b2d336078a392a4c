"""Judge and quality score files: JSON arrays of per-video entries."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import FormatError, ValidationError

JUDGE_SOURCES = ("VLM", "Human")
SCORE_RANGE = (0, 1, 2, 3, 4, 5)


@dataclass(frozen=True)
class JudgeScores:
    video_id: str
    global_alignment: int
    fine_alignment: int
    source: str                         # "VLM" or "Human"
    annotator_id: str | None = None

    def __post_init__(self):
        for fld in ("global_alignment", "fine_alignment"):
            val = getattr(self, fld)
            if not isinstance(val, int) or isinstance(val, bool) \
                    or val not in SCORE_RANGE:
                raise ValidationError(
                    f"judge entry '{self.video_id}': {fld} must be an integer "
                    f"in [0, 5], got {val!r}")
        if self.source not in JUDGE_SOURCES:
            raise ValidationError(
                f"judge entry '{self.video_id}': source must be one of "
                f"{JUDGE_SOURCES}, got {self.source!r}")


@dataclass(frozen=True)
class QualityScore:
    video_id: str
    overall: float

    def __post_init__(self):
        if not 0.0 <= self.overall <= 5.0:
            raise ValidationError(
                f"quality entry '{self.video_id}': overall score "
                f"{self.overall} outside [0, 5]")


def _load_array(path: Path) -> list[dict]:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: "
                          f"{exc.msg}") from exc
    if not isinstance(doc, list) or not all(isinstance(e, dict) for e in doc):
        raise FormatError(f"{path}: expected a JSON array of objects")
    return doc


def read_judge_scores(path: str | Path) -> list[JudgeScores]:
    path = Path(path)
    entries = []
    for i, raw in enumerate(_load_array(path)):
        try:
            entries.append(JudgeScores(
                video_id=str(raw["video_id"]),
                global_alignment=raw["global_alignment"],
                fine_alignment=raw["fine_alignment"],
                source=raw.get("source", "VLM"),
                annotator_id=raw.get("annotator_id"),
            ))
        except KeyError as exc:
            raise FormatError(f"{path}: entry {i} missing field {exc}") from exc
    return entries


def write_judge_scores(path: str | Path, entries: list[JudgeScores]) -> None:
    doc = [
        {"video_id": e.video_id, "global_alignment": e.global_alignment,
         "fine_alignment": e.fine_alignment, "source": e.source,
         **({"annotator_id": e.annotator_id} if e.annotator_id else {})}
        for e in entries
    ]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_quality_scores(path: str | Path) -> list[QualityScore]:
    path = Path(path)
    entries = []
    for i, raw in enumerate(_load_array(path)):
        try:
            entries.append(QualityScore(video_id=str(raw["video_id"]),
                                        overall=float(raw["overall"])))
        except KeyError as exc:
            raise FormatError(f"{path}: entry {i} missing field {exc}") from exc
    return entries


def write_quality_scores(path: str | Path, entries: list[QualityScore]) -> None:
    doc = [{"video_id": e.video_id, "overall": e.overall} for e in entries]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
