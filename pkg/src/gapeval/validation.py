"""Full-benchmark validation: collects every schema and invariant
violation instead of stopping at the first, so `gap validate` can report
a complete list. Also the cross-language contract check for feature files
produced by external extractors.
"""

from __future__ import annotations

from pathlib import Path

from .errors import FormatError, GapError, ValidationError
from .interchange import (
    image_size,
    parse_manifest,
    read_embeddings,
    read_judge_scores,
    read_mask,
    read_matches,
    read_quality_scores,
    record_violations,
)
from .judge_metric import aggregate_judge


def _check_image(path: Path, what: str, rid: str,
                 violations: list[str]) -> tuple[int, int] | None:
    if not path.is_file():
        violations.append(f"{rid}: {what} '{path}' does not resolve to a file")
        return None
    try:
        return image_size(path)
    except Exception as exc:
        violations.append(f"{rid}: {what} '{path}' is not a readable image: {exc}")
        return None


def _validate_embeddings(features: Path, rid: str, n_frames: int,
                         dims: dict[str, int], violations: list[str]) -> None:
    present = sorted(features.glob(f"{rid}.*.emb"))
    if not present:
        return
    expected = [features / f"{rid}.gt.emb"] + \
               [features / f"{rid}.f{k}.emb" for k in range(n_frames)]
    for path in expected:
        if not path.is_file():
            violations.append(f"{rid}: missing embedding file '{path.name}'")
            continue
        try:
            emb = read_embeddings(path)
        except GapError as exc:
            violations.append(f"{rid}: {exc}")
            continue
        dims.setdefault("dim", emb.dim)
        if emb.dim != dims["dim"]:
            violations.append(
                f"{rid}: embedding dim {emb.dim} in '{path.name}' differs "
                f"from benchmark dim {dims['dim']}")


def _validate_masks(features: Path, rid: str, gt_shape: tuple[int, int] | None,
                    violations: list[str]) -> None:
    present = sorted(features.glob(f"{rid}.r*.mask.png"))
    if not present:
        return
    indices = set()
    for path in present:
        middle = path.name[len(rid) + 2:-len(".mask.png")]
        try:
            indices.add(int(middle))
        except ValueError:
            violations.append(f"{rid}: unrecognized mask name '{path.name}'")
    for k in range(max(indices) + 1 if indices else 0):
        path = features / f"{rid}.r{k}.mask.png"
        if not path.is_file():
            violations.append(f"{rid}: mask index gap, missing '{path.name}'")
            continue
        try:
            read_mask(path, expected_shape=gt_shape)
        except GapError as exc:
            violations.append(f"{rid}: {exc}")


def _validate_matches(features: Path, rid: str, n_frames: int,
                      gt_size: tuple[int, int] | None,
                      frame_sizes: list[tuple[int, int] | None],
                      violations: list[str]) -> None:
    present = sorted(features.glob(f"{rid}.*.matches"))
    if not present:
        return
    self_path = features / f"{rid}.self.matches"
    if not self_path.is_file():
        violations.append(f"{rid}: missing self-match baseline "
                          f"'{self_path.name}'")
    else:
        try:
            read_matches(self_path, gt_size=gt_size, frame_size=gt_size)
        except GapError as exc:
            violations.append(f"{rid}: {exc}")
    for k in range(n_frames):
        path = features / f"{rid}.f{k}.matches"
        if not path.is_file():
            violations.append(f"{rid}: missing match file '{path.name}'")
            continue
        try:
            read_matches(path, gt_size=gt_size,
                         frame_size=frame_sizes[k] if k < len(frame_sizes) else None)
        except GapError as exc:
            violations.append(f"{rid}: {exc}")


def _validate_score_files(features: Path, violations: list[str]) -> None:
    judge_by_video: dict[str, list] = {}
    for name in ("judge.json", "human.json"):
        path = features / name
        if not path.is_file():
            continue
        try:
            for entry in read_judge_scores(path):
                judge_by_video.setdefault(entry.video_id, []).append(entry)
        except GapError as exc:
            violations.append(str(exc))
    for video_id, entries in sorted(judge_by_video.items()):
        try:
            aggregate_judge(entries)
        except GapError as exc:
            violations.append(str(exc))
    path = features / "quality.json"
    if path.is_file():
        try:
            read_quality_scores(path)
        except GapError as exc:
            violations.append(str(exc))


def collect_violations(manifest_path: str | Path,
                       features_dir: str | Path | None = None) -> list[str]:
    """Every violation in the manifest and, when a features directory is
    present, in the feature files it holds. Empty list means valid.

    Raises OSError only for an unreadable manifest path.
    """
    manifest_path = Path(manifest_path)
    try:
        config, raw, root = parse_manifest(manifest_path)
    except (FormatError, ValidationError) as exc:
        return [str(exc)]

    violations: list[str] = []
    seen: set[str] = set()
    gt_shapes: dict[str, tuple[int, int] | None] = {}
    gt_sizes: dict[str, tuple[int, int] | None] = {}
    frame_sizes: dict[str, list[tuple[int, int] | None]] = {}
    valid_ids: list[str] = []

    for i, entry in enumerate(raw):
        rid = entry.get("id") if isinstance(entry.get("id"), str) \
            else f"attractions[{i}]"
        problems = record_violations(entry, config.n_frames)
        violations.extend(f"{rid}: {p}" for p in problems)
        if isinstance(entry.get("id"), str):
            if entry["id"] in seen:
                violations.append(f"{rid}: duplicate attraction id")
            seen.add(entry["id"])
        if problems:
            continue
        valid_ids.append(rid)
        size = _check_image(root / entry["gt_image"], "gt_image", rid, violations)
        gt_sizes[rid] = size
        gt_shapes[rid] = (size[1], size[0]) if size else None
        frame_sizes[rid] = [
            _check_image(root / f, f"frame {k}", rid, violations)
            for k, f in enumerate(entry["frames"])
        ]

    if features_dir is None:
        candidate = manifest_path.parent / "features"
        features = candidate if candidate.is_dir() else None
    else:
        features = Path(features_dir)
        if not features.is_dir():
            violations.append(f"features directory '{features}' does not exist")
            features = None

    if features is not None:
        dims: dict[str, int] = {}
        for rid in valid_ids:
            _validate_embeddings(features, rid, config.n_frames, dims, violations)
            _validate_masks(features, rid, gt_shapes.get(rid), violations)
            _validate_matches(features, rid, config.n_frames,
                              gt_sizes.get(rid), frame_sizes.get(rid, []),
                              violations)
        _validate_score_files(features, violations)

    return violations
