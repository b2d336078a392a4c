"""Benchmark manifest: one JSON document with a `config` object and an
`attractions` array. All file references inside are relative to the
manifest's directory and are resolved to absolute paths at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FormatError, ValidationError

CONTINENTS = ("Africa", "Americas", "Asia", "Europe", "Oceania")
NORTH_SOUTH = ("GlobalNorth", "GlobalSouth")
WEST_EAST = ("GlobalWest", "GlobalEast")

DEFAULT_N_FRAMES = 5
DEFAULT_TAU = 3000.0
DEFAULT_BETA = 1.5


@dataclass(frozen=True)
class EngineConfig:
    n_frames: int = DEFAULT_N_FRAMES
    tau: float = DEFAULT_TAU
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValidationError(f"config.n_frames must be >= 1, got {self.n_frames}")
        if self.tau <= 0:
            raise ValidationError(f"config.tau must be > 0, got {self.tau}")
        if self.beta <= 0:
            raise ValidationError(f"config.beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class AttractionRecord:
    id: str
    name: str
    city: str
    country: str
    continent: str
    north_south: str
    west_east: str
    pageviews: int
    category: str
    gt_image: Path
    short_caption: str
    detailed_caption: str
    frames: tuple[Path, ...]


@dataclass(frozen=True)
class Benchmark:
    records: tuple[AttractionRecord, ...]
    config: EngineConfig
    root: Path

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[str, AttractionRecord]:
        return {r.id: r for r in self.records}


_STRING_FIELDS = ("id", "name", "city", "country", "category",
                  "short_caption", "detailed_caption")
_ENUM_FIELDS = {"continent": CONTINENTS, "north_south": NORTH_SOUTH,
                "west_east": WEST_EAST}


def parse_manifest(path: str | Path) -> tuple[EngineConfig, list[dict], Path]:
    """Parse without record validation; raises FormatError on bad JSON."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read manifest {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: manifest root must be an object")
    raw_cfg = doc.get("config", {})
    if not isinstance(raw_cfg, dict):
        raise FormatError(f"{path}: 'config' must be an object")
    for key in raw_cfg:
        if key not in ("n_frames", "tau", "beta"):
            raise FormatError(f"{path}: unknown config field '{key}'")
    config = EngineConfig(
        n_frames=int(raw_cfg.get("n_frames", DEFAULT_N_FRAMES)),
        tau=float(raw_cfg.get("tau", DEFAULT_TAU)),
        beta=float(raw_cfg.get("beta", DEFAULT_BETA)),
    )
    raw = doc.get("attractions")
    if not isinstance(raw, list):
        raise FormatError(f"{path}: 'attractions' must be an array")
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: attractions[{i}] must be an object")
    return config, raw, path.parent.resolve()


def record_violations(entry: dict, n_frames: int) -> list[str]:
    """Schema problems for one raw attraction entry (empty list = clean)."""
    problems = []
    for fld in _STRING_FIELDS:
        if not isinstance(entry.get(fld), str):
            problems.append(f"field '{fld}' missing or not a string")
    for fld, allowed in _ENUM_FIELDS.items():
        if entry.get(fld) not in allowed:
            problems.append(
                f"field '{fld}' must be one of {allowed}, got {entry.get(fld)!r}")
    pv = entry.get("pageviews")
    if not isinstance(pv, int) or isinstance(pv, bool) or pv < 0:
        problems.append(f"field 'pageviews' must be a non-negative integer, got {pv!r}")
    if not isinstance(entry.get("gt_image"), str):
        problems.append("field 'gt_image' missing or not a string")
    frames = entry.get("frames")
    if not isinstance(frames, list) or not all(isinstance(f, str) for f in frames):
        problems.append("field 'frames' must be an array of path strings")
    elif len(frames) != n_frames:
        problems.append(f"expected {n_frames} frames, got {len(frames)}")
    return problems


def _build_record(entry: dict, root: Path) -> AttractionRecord:
    return AttractionRecord(
        id=entry["id"],
        name=entry["name"],
        city=entry["city"],
        country=entry["country"],
        continent=entry["continent"],
        north_south=entry["north_south"],
        west_east=entry["west_east"],
        pageviews=entry["pageviews"],
        category=entry["category"],
        gt_image=root / entry["gt_image"],
        short_caption=entry["short_caption"],
        detailed_caption=entry["detailed_caption"],
        frames=tuple(root / f for f in entry["frames"]),
    )


def load_manifest(path: str | Path) -> Benchmark:
    """Load and validate a manifest; first schema violation raises."""
    config, raw, root = parse_manifest(path)
    seen: set[str] = set()
    records = []
    for i, entry in enumerate(raw):
        problems = record_violations(entry, config.n_frames)
        if problems:
            label = entry.get("id", f"attractions[{i}]")
            raise ValidationError(f"{path}: record '{label}': {problems[0]}")
        if entry["id"] in seen:
            raise ValidationError(f"{path}: duplicate attraction id '{entry['id']}'")
        seen.add(entry["id"])
        records.append(_build_record(entry, root))
    return Benchmark(records=tuple(records), config=config, root=root)


def write_manifest(path: str | Path, config: EngineConfig,
                   attractions: list[dict]) -> None:
    doc = {
        "config": {"n_frames": config.n_frames, "tau": config.tau,
                   "beta": config.beta},
        "attractions": attractions,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
