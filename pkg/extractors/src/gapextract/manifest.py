"""Lenient manifest access for extraction jobs.

Unlike the engine's loader, records may lack frames (the frames job fills
them in) and captions (the captions job writes them).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Job:
    id: str
    gt_image: Path
    name: str = ""
    city: str = ""
    country: str = ""
    category: str = ""
    detailed_caption: str = ""
    short_caption: str = ""
    frames: list[Path] = field(default_factory=list)
    raw: dict = field(default_factory=dict)


def load_jobs(manifest_path: str | Path,
              ids: set[str] | None = None) -> tuple[dict, list[Job]]:
    """(raw manifest document, jobs). Entries without id/gt_image raise."""
    manifest_path = Path(manifest_path)
    doc = json.loads(manifest_path.read_text())
    root = manifest_path.parent
    jobs = []
    for entry in doc.get("attractions", []):
        if "id" not in entry or "gt_image" not in entry:
            raise ValueError(f"manifest entry missing id/gt_image: {entry}")
        if ids is not None and entry["id"] not in ids:
            continue
        jobs.append(Job(
            id=entry["id"],
            gt_image=root / entry["gt_image"],
            name=entry.get("name", ""),
            city=entry.get("city", ""),
            country=entry.get("country", ""),
            category=entry.get("category", ""),
            detailed_caption=entry.get("detailed_caption", ""),
            short_caption=entry.get("short_caption", ""),
            frames=[root / f for f in entry.get("frames", [])],
            raw=entry,
        ))
    return doc, jobs


def n_frames(doc: dict, default: int = 5) -> int:
    return int(doc.get("config", {}).get("n_frames", default))


def write_manifest(path: str | Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
