"""On-disk artifact formats: manifest, embeddings, masks, matches, scores."""

from .embeddings import PatchEmbeddings, read_embeddings, write_embeddings
from .manifest import (
    CONTINENTS,
    NORTH_SOUTH,
    WEST_EAST,
    AttractionRecord,
    Benchmark,
    EngineConfig,
    load_manifest,
    parse_manifest,
    record_violations,
    write_manifest,
)
from .matches import MatchSet, read_matches, write_matches
from .rasters import (
    RegionMask,
    image_size,
    luminance,
    read_grayscale,
    read_mask,
    write_mask,
)
from .scores import (
    JudgeScores,
    QualityScore,
    read_judge_scores,
    read_quality_scores,
    write_judge_scores,
    write_quality_scores,
)

__all__ = [
    "AttractionRecord", "Benchmark", "EngineConfig", "JudgeScores",
    "MatchSet", "PatchEmbeddings", "QualityScore", "RegionMask",
    "CONTINENTS", "NORTH_SOUTH", "WEST_EAST",
    "image_size", "load_manifest", "luminance", "parse_manifest",
    "read_embeddings", "read_grayscale", "read_judge_scores", "read_mask",
    "read_matches", "read_quality_scores", "record_violations",
    "write_embeddings", "write_judge_scores", "write_manifest", "write_mask",
    "write_matches", "write_quality_scores",
]
