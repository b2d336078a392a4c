"""Batch scoring: walks a benchmark, computes per-video metrics from the
interchange files, joins judge/quality scores, and emits the score table.

Feature files live in one directory, named by convention:
`<id>.gt.emb`, `<id>.f<k>.emb`, `<id>.r<k>.mask.png`, `<id>.f<k>.matches`,
`<id>.self.matches`, plus optional `judge.json`, `human.json`,
`quality.json`.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ContractError, GapError, ValidationError
from .geo_stats import ScoreRow
from .interchange import (
    AttractionRecord,
    Benchmark,
    RegionMask,
    image_size,
    read_embeddings,
    read_grayscale,
    read_judge_scores,
    read_mask,
    read_matches,
    read_quality_scores,
)
from .judge_metric import aggregate_judge
from .keypoint_metric import evaluate_region, frame_alignment, video_alignment
from .patch_metric import patch_similarity, video_patch_score

SCORES_NAME = "scores.csv"
ERRORS_NAME = "score_errors.json"

_CSV_COLUMNS = ("id", "name", "city", "country", "continent", "north_south",
                "west_east", "pageviews", "category",
                "patch_clip", "keypoint", "vlm_avg", "human_avg", "quality")


@dataclass(frozen=True)
class RunConfig:
    manifest: Path
    out_dir: Path
    features_dir: Path | None = None
    n_frames: int | None = None          # None: use the manifest's config
    tau: float | None = None
    beta: float | None = None
    resamples: int = 10_000
    seed: int = 0
    delta: float = 1.0
    log_popularity: bool = False
    jobs: int = 1
    subset: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_frames is not None and self.n_frames < 1:
            raise ContractError("n_frames must be >= 1")
        for name in ("tau", "beta"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ContractError(f"{name} must be > 0")
        if self.delta <= 0:
            raise ContractError("delta must be > 0")
        if self.resamples < 1000:
            raise ContractError("resamples must be >= 1000")
        if self.jobs < 1:
            raise ContractError("jobs must be >= 1")


def default_features_dir(manifest_path: Path) -> Path:
    return Path(manifest_path).parent / "features"


def full_image_mask(shape: tuple[int, int]) -> RegionMask:
    pixels = np.ones(shape, dtype=bool)
    pixels.setflags(write=False)
    return RegionMask(pixels=pixels, area=int(pixels.size), label="full-image")


def load_region_masks(features_dir: Path, attraction_id: str,
                      shape: tuple[int, int]) -> list[RegionMask]:
    """Masks `<id>.r0.mask.png`, `<id>.r1.mask.png`, ... read in index order
    until the first missing index."""
    masks = []
    k = 0
    while True:
        path = features_dir / f"{attraction_id}.r{k}.mask.png"
        if not path.exists():
            break
        masks.append(read_mask(path, expected_shape=shape, label=f"r{k}"))
        k += 1
    return masks


def score_attraction(record: AttractionRecord, features_dir: Path,
                     n_frames: int, tau: float, beta: float
                     ) -> tuple[dict[str, float | None], list[dict]]:
    """Patch and keypoint video scores for one attraction. Each metric
    fails independently: a failure yields None plus an error entry."""
    errors: list[dict] = []
    metrics: dict[str, float | None] = {"patch_clip": None, "keypoint": None}

    try:
        gt_emb = read_embeddings(features_dir / f"{record.id}.gt.emb")
        per_frame = []
        for k in range(n_frames):
            frame_emb = read_embeddings(features_dir / f"{record.id}.f{k}.emb")
            per_frame.append(patch_similarity(gt_emb, frame_emb))
        metrics["patch_clip"] = video_patch_score(per_frame).video
    except (GapError, OSError) as exc:
        errors.append({"id": record.id, "stage": "patch", "error": str(exc)})

    try:
        gray = read_grayscale(record.gt_image)
        height, width = gray.shape
        laplacian = _kernels.laplacian_response(gray)
        masks = load_region_masks(features_dir, record.id, gray.shape)
        if not masks:
            # Detection produced nothing; fall back to one full-image region.
            masks = [full_image_mask(gray.shape)]
        areas = [m.area for m in masks]
        self_matches = read_matches(
            features_dir / f"{record.id}.self.matches",
            gt_size=(width, height), frame_size=(width, height))
        frames = []
        for k in range(n_frames):
            frame_matches = read_matches(
                features_dir / f"{record.id}.f{k}.matches",
                gt_size=(width, height),
                frame_size=image_size(record.frames[k]))
            regions = [
                evaluate_region(gray, mask, frame_matches, self_matches,
                                tau, beta, region_index=j, laplacian=laplacian)
                for j, mask in enumerate(masks)
            ]
            frames.append(frame_alignment(regions, areas))
        metrics["keypoint"] = video_alignment(frames).video
    except (GapError, OSError) as exc:
        errors.append({"id": record.id, "stage": "keypoint", "error": str(exc)})

    return metrics, errors


def _join_judges(features_dir: Path, judge_path: Path | None,
                 human_path: Path | None, quality_path: Path | None
                 ) -> dict[str, object]:
    """Aggregated judge/quality scores by video id. Default file locations
    apply when no explicit path is given and the conventional file exists."""
    def pick(explicit: Path | None, name: str) -> Path | None:
        if explicit is not None:
            return explicit
        conventional = features_dir / name
        return conventional if conventional.exists() else None

    by_video: dict[str, list] = {}
    for path in (pick(judge_path, "judge.json"), pick(human_path, "human.json")):
        if path is None:
            continue
        for entry in read_judge_scores(path):
            by_video.setdefault(entry.video_id, []).append(entry)

    quality_by_video: dict[str, object] = {}
    qpath = pick(quality_path, "quality.json")
    if qpath is not None:
        for entry in read_quality_scores(qpath):
            if entry.video_id in quality_by_video:
                raise ValidationError(
                    f"{qpath}: duplicate quality entry for '{entry.video_id}'")
            quality_by_video[entry.video_id] = entry

    aggregated = {}
    for video_id in sorted(set(by_video) | set(quality_by_video)):
        aggregated[video_id] = aggregate_judge(
            by_video.get(video_id, []), quality_by_video.get(video_id))
    return aggregated


def run_score(benchmark: Benchmark, config: RunConfig,
              judge_path: Path | None = None,
              human_path: Path | None = None,
              quality_path: Path | None = None
              ) -> tuple[list[ScoreRow], list[dict]]:
    """Score every (optionally subset-filtered) attraction, in parallel,
    with output deterministic in the attraction id order."""
    features_dir = config.features_dir or default_features_dir(config.manifest)
    n_frames = config.n_frames or benchmark.config.n_frames
    tau = config.tau if config.tau is not None else benchmark.config.tau
    beta = config.beta if config.beta is not None else benchmark.config.beta

    records = sorted(benchmark.records, key=lambda r: r.id)
    if config.subset:
        wanted = set(config.subset)
        unknown = wanted - {r.id for r in records}
        if unknown:
            raise ValidationError(f"unknown attraction ids in subset: "
                                  f"{sorted(unknown)}")
        records = [r for r in records if r.id in wanted]

    aggregated = _join_judges(features_dir, judge_path, human_path,
                              quality_path)

    def work(record):
        return record.id, score_attraction(record, features_dir, n_frames,
                                           tau, beta)

    results: dict[str, tuple[dict, list]] = {}
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            for rid, outcome in pool.map(work, records):
                results[rid] = outcome
    else:
        for record in records:
            rid, outcome = work(record)
            results[rid] = outcome

    rows, errors = [], []
    for record in records:
        metrics, record_errors = results[record.id]
        errors.extend(record_errors)
        judge = aggregated.get(record.id)
        rows.append(ScoreRow(
            id=record.id, name=record.name, city=record.city,
            country=record.country, continent=record.continent,
            north_south=record.north_south, west_east=record.west_east,
            pageviews=record.pageviews, category=record.category,
            patch_clip=metrics["patch_clip"], keypoint=metrics["keypoint"],
            vlm_avg=judge.vlm_avg if judge else None,
            human_avg=judge.human_avg if judge else None,
            quality=judge.quality if judge else None,
        ))
    return rows, errors


def format_float(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.6g}"


def write_scores_csv(path: Path, rows: list[ScoreRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                row.id, row.name, row.city, row.country, row.continent,
                row.north_south, row.west_east, str(row.pageviews),
                row.category,
                format_float(row.patch_clip), format_float(row.keypoint),
                format_float(row.vlm_avg), format_float(row.human_avg),
                format_float(row.quality),
            ])


def write_errors_sidecar(path: Path, errors: list[dict]) -> None:
    ordered = sorted(errors, key=lambda e: (e["id"], e["stage"]))
    path.write_text(json.dumps(ordered, indent=2) + "\n")


def read_scores_csv(path: Path) -> list[ScoreRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            def opt(name):
                val = raw.get(name, "")
                return float(val) if val not in ("", None) else None
            rows.append(ScoreRow(
                id=raw["id"], name=raw.get("name", ""),
                city=raw.get("city", ""), country=raw.get("country", ""),
                continent=raw.get("continent", ""),
                north_south=raw.get("north_south", ""),
                west_east=raw.get("west_east", ""),
                pageviews=int(raw["pageviews"]) if raw.get("pageviews") else 0,
                category=raw.get("category", ""),
                patch_clip=opt("patch_clip"), keypoint=opt("keypoint"),
                vlm_avg=opt("vlm_avg"), human_avg=opt("human_avg"),
                quality=opt("quality"),
            ))
    return rows
