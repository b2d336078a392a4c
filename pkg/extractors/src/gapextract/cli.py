"""`gap-extract`: produces every interchange artifact the scoring engine
consumes. Jobs are independent per attraction; a failing attraction is
reported and skipped, and the command exits 1 if any job failed."""

from __future__ import annotations

import json
import logging
import os
import shutil
import sys
from pathlib import Path

import click

from .backends import get_backend
from .captions import generate_captions
from .client import ChatClient, ExtractionError
from .embed import run_embed_job
from .formats import write_judge_scores
from .frames import sample_frames
from .judge import judge_video
from .manifest import Job, load_jobs, n_frames, write_manifest
from .matching import run_match_job
from .regions import DETECTION_PHRASES, run_region_job

log = logging.getLogger("gapextract")


def _parse_ids(ids: str | None) -> set[str] | None:
    return set(s for s in ids.split(",") if s) if ids else None


def _run_jobs(jobs, worker) -> int:
    failed = 0
    for job in jobs:
        try:
            worker(job)
        except Exception as exc:
            failed += 1
            log.error("job failed for attraction '%s': %s", job.id, exc)
            click.echo(f"error: {job.id}: {exc}", err=True)
    return failed


def _finish(failed: int, total: int, what: str):
    click.echo(f"{what}: {total - failed}/{total} attractions done")
    if failed:
        sys.exit(1)


@click.group()
@click.option("--verbose", is_flag=True)
def main(verbose):
    """Feature extraction for the landmark-alignment engine."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO)


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--videos", required=True, type=click.Path(path_type=Path),
              help="Directory holding <id>.mp4 videos or <id>/ frame dirs.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--n-frames", "frame_count", type=int, default=None)
@click.option("--ids", default=None)
def frames(manifest, videos, out_dir, frame_count, ids):
    """Sample frames uniformly and write an engine-ready benchmark dir."""
    doc, jobs = load_jobs(manifest, _parse_ids(ids))
    count = frame_count or n_frames(doc)
    images = out_dir / "images"
    images.mkdir(parents=True, exist_ok=True)
    entries = {e["id"]: e for e in doc.get("attractions", [])}

    def worker(job: Job):
        source = None
        for candidate in (videos / f"{job.id}.mp4", videos / f"{job.id}.avi",
                          videos / job.id):
            if candidate.exists():
                source = candidate
                break
        if source is None:
            raise FileNotFoundError(f"no video or frame dir for '{job.id}' "
                                    f"under {videos}")
        paths = sample_frames(source, count, images, job.id)
        gt_dest = images / f"{job.id}.gt{job.gt_image.suffix}"
        shutil.copyfile(job.gt_image, gt_dest)
        entries[job.id]["gt_image"] = str(gt_dest.relative_to(out_dir))
        entries[job.id]["frames"] = [str(p.relative_to(out_dir))
                                     for p in paths]

    failed = _run_jobs(jobs, worker)
    write_manifest(out_dir / "manifest.json", doc)
    _finish(failed, len(jobs), "frames")


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--backend", default="dct", show_default=True)
@click.option("--patch", type=int, default=8, show_default=True,
              help="Patch size for the builtin embedder.")
@click.option("--ids", default=None)
def embed(manifest, out_dir, backend, patch, ids):
    """Write `<id>.gt.emb` and `<id>.f<k>.emb` patch-embedding files."""
    _, jobs = load_jobs(manifest, _parse_ids(ids))
    kwargs = {"patch_size": patch} if backend == "dct" else {}
    embedder = get_backend("embed", backend, **kwargs)

    def worker(job: Job):
        if not job.frames:
            raise ValueError("record has no frames; run the frames job first")
        run_embed_job(embedder, job.id, job.gt_image, job.frames, out_dir)

    _finish(_run_jobs(jobs, worker), len(jobs), "embed")


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--backend", default="contrast", show_default=True)
@click.option("--ids", default=None)
def regions(manifest, out_dir, backend, ids):
    """Write `<id>.r<k>.mask.png` landmark-region masks."""
    _, jobs = load_jobs(manifest, _parse_ids(ids))
    detector = get_backend("regions", backend)

    def worker(job: Job):
        phrases = tuple(dict.fromkeys(
            ([job.category] if job.category else []) + list(DETECTION_PHRASES)))
        written = run_region_job(detector, job.id, job.gt_image, out_dir,
                                 phrases=phrases)
        if not written:
            log.info("no regions detected for '%s'; engine will use the "
                     "full-image fallback", job.id)

    _finish(_run_jobs(jobs, worker), len(jobs), "regions")


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--backend", default="corner_ncc", show_default=True)
@click.option("--ids", default=None)
def match(manifest, out_dir, backend, ids):
    """Write `<id>.f<k>.matches` and the `<id>.self.matches` baseline."""
    _, jobs = load_jobs(manifest, _parse_ids(ids))
    matcher = get_backend("match", backend)

    def worker(job: Job):
        if not job.frames:
            raise ValueError("record has no frames; run the frames job first")
        run_match_job(matcher, job.id, job.gt_image, job.frames, out_dir)

    _finish(_run_jobs(jobs, worker), len(jobs), "match")


def _chat_client(api_base, model, attempts, backoff) -> ChatClient:
    return ChatClient(base_url=api_base, api_key=os.environ.get("GAP_API_KEY"),
                      model=model, attempts=attempts, backoff=backoff)


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--api-base", required=True)
@click.option("--model", default="gpt-5.1", show_default=True)
@click.option("--attempts", default=3, show_default=True)
@click.option("--backoff", default=0.5, show_default=True)
@click.option("--caption-field", default="detailed_caption",
              type=click.Choice(["detailed_caption", "short_caption"]),
              show_default=True)
@click.option("--ids", default=None)
def judge(manifest, out_dir, api_base, model, attempts, backoff,
          caption_field, ids):
    """Write judge.json with one VLM entry per video."""
    _, jobs = load_jobs(manifest, _parse_ids(ids))
    client = _chat_client(api_base, model, attempts, backoff)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    absent = []

    def worker(job: Job):
        if not job.frames:
            raise ValueError("record has no frames; run the frames job first")
        instruction = getattr(job, caption_field) or job.name
        entry = judge_video(client, job.gt_image, job.frames, instruction)
        if entry is None:
            absent.append(job.id)
            raise ExtractionError("no valid judge reply")
        entries.append({"video_id": job.id, **entry})

    failed = _run_jobs(jobs, worker)
    client.close()
    write_judge_scores(out_dir / "judge.json", entries)
    if absent:
        (out_dir / "judge_errors.json").write_text(
            json.dumps(sorted(absent), indent=2) + "\n")
    _finish(failed, len(jobs), "judge")


@main.command()
@click.option("--manifest", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--api-base", required=True)
@click.option("--model", default="gpt-5.1", show_default=True)
@click.option("--attempts", default=3, show_default=True)
@click.option("--backoff", default=0.5, show_default=True)
@click.option("--ids", default=None)
def captions(manifest, out_dir, api_base, model, attempts, backoff, ids):
    """Generate detailed/short captions; mismatches go to review.json and
    are not merged into the captioned manifest."""
    doc, jobs = load_jobs(manifest, _parse_ids(ids))
    client = _chat_client(api_base, model, attempts, backoff)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = {e["id"]: e for e in doc.get("attractions", [])}
    accepted, review = [], []

    def worker(job: Job):
        result = generate_captions(client, job.gt_image, job.name, job.city,
                                   job.country)
        record = {"id": job.id, "is_correct_place": result.is_correct_place,
                  "detailed_caption": result.detailed_caption,
                  "short_caption": result.short_caption}
        if result.is_correct_place:
            accepted.append(record)
            entries[job.id]["detailed_caption"] = result.detailed_caption
            entries[job.id]["short_caption"] = result.short_caption
        else:
            review.append(record)

    failed = _run_jobs(jobs, worker)
    client.close()
    (out_dir / "captions.json").write_text(
        json.dumps(accepted + review, indent=2) + "\n")
    (out_dir / "review.json").write_text(json.dumps(review, indent=2) + "\n")
    write_manifest(out_dir / "manifest.captioned.json", doc)
    if review:
        click.echo(f"{len(review)} attraction(s) flagged for manual review",
                   err=True)
    _finish(failed, len(jobs), "captions")


if __name__ == "__main__":
    main()
