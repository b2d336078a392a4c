"""Analysis report generation: popularity trends, regional summaries,
bootstrap equivalence, metric correlations, and paired prompt comparison,
each as one delimiter-separated table."""

from __future__ import annotations

import csv
import itertools
import json
import math
from pathlib import Path

from .errors import ContractError, DegenerateDataError
from .geo_stats import (
    GROUP_AXES,
    METRICS,
    ScoreRow,
    bootstrap_equivalence,
    group_summary,
    metric_correlation_matrix,
    paired_comparison,
    popularity_trend,
)
from .pipeline import format_float


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def _popularity(rows: list[ScoreRow], log_scale: bool) -> list[float]:
    if log_scale:
        return [math.log10(1.0 + r.pageviews) for r in rows]
    return [float(r.pageviews) for r in rows]


def write_trend_table(rows: list[ScoreRow], path: Path,
                      log_popularity: bool) -> None:
    out = []
    for metric in METRICS:
        usable = [r for r in rows if getattr(r, metric) is not None]
        if len(usable) < 3:
            continue
        x = _popularity(usable, log_popularity)
        y = [getattr(r, metric) for r in usable]
        try:
            trend = popularity_trend(x, y)
        except (ContractError, DegenerateDataError):
            continue
        out.append([metric, str(trend.n), format_float(trend.srcc),
                    format_float(trend.srcc_p), format_float(trend.slope),
                    format_float(trend.slope_p)])
    _write_csv(path, ["metric", "n", "srcc", "srcc_p", "slope", "slope_p"], out)


def write_groups_table(rows: list[ScoreRow], path: Path) -> None:
    out = []
    for axis in GROUP_AXES:
        for metric in METRICS:
            for summary in group_summary(rows, metric, axis):
                out.append([axis, summary.label, metric, str(summary.n),
                            format_float(summary.mean),
                            format_float(summary.std),
                            _fmt_bool(summary.degenerate)])
    _write_csv(path, ["axis", "label", "metric", "n", "mean", "std",
                      "degenerate"], out)


def write_equivalence_table(rows: list[ScoreRow], path: Path, delta: float,
                            resamples: int, seed: int, jobs: int) -> None:
    out = []
    for axis, labels in GROUP_AXES.items():
        for metric in METRICS:
            values = {
                label: [getattr(r, metric) for r in rows
                        if getattr(r, axis) == label
                        and getattr(r, metric) is not None]
                for label in labels
            }
            eligible = [lab for lab in labels if len(values[lab]) >= 2]
            for lab_a, lab_b in itertools.combinations(eligible, 2):
                res = bootstrap_equivalence(
                    values[lab_a], values[lab_b], delta,
                    resamples=resamples, seed=seed, jobs=jobs,
                    group_a=lab_a, group_b=lab_b)
                out.append([axis, metric, lab_a, lab_b,
                            str(len(values[lab_a])), str(len(values[lab_b])),
                            format_float(res.mean_diff),
                            format_float(res.ci_low),
                            format_float(res.ci_high),
                            format_float(res.delta),
                            _fmt_bool(res.equivalent),
                            str(res.resamples), str(res.seed)])
    _write_csv(path, ["axis", "metric", "group_a", "group_b", "n_a", "n_b",
                      "mean_diff", "ci_low", "ci_high", "delta", "equivalent",
                      "resamples", "seed"], out)


def write_correlation_table(rows: list[ScoreRow], path: Path) -> None:
    matrix = metric_correlation_matrix(rows)
    out = []
    for i, metric_a in enumerate(METRICS):
        for metric_b in METRICS[i:]:
            entry = matrix[(metric_a, metric_b)]
            if entry is None:
                out.append([metric_a, metric_b, "", "", ""])
            else:
                rho, p, n = entry
                out.append([metric_a, metric_b, str(n), format_float(rho),
                            format_float(p)])
    _write_csv(path, ["metric_a", "metric_b", "n", "srcc", "p"], out)


def write_paired_table(short_rows: list[ScoreRow],
                       detailed_rows: list[ScoreRow], path: Path) -> None:
    """Short-prompt vs detailed-prompt runs, joined on attraction id.
    cohens_d is computed on (detailed - short): positive means the
    detailed prompt scores higher."""
    short_by_id = {r.id: r for r in short_rows}
    detailed_by_id = {r.id: r for r in detailed_rows}
    shared = sorted(set(short_by_id) & set(detailed_by_id))
    out = []
    for metric in METRICS:
        pairs = [(getattr(short_by_id[i], metric),
                  getattr(detailed_by_id[i], metric))
                 for i in shared
                 if getattr(short_by_id[i], metric) is not None
                 and getattr(detailed_by_id[i], metric) is not None]
        if len(pairs) < 2:
            continue
        short_vals = [p[0] for p in pairs]
        detailed_vals = [p[1] for p in pairs]
        res = paired_comparison(detailed_vals, short_vals)
        out.append([metric, str(res.n_pairs), format_float(res.mean_b),
                    format_float(res.mean_a), format_float(res.wilcoxon_p),
                    format_float(res.cohens_d)])
    _write_csv(path, ["metric", "n_pairs", "mean_short", "mean_detailed",
                      "wilcoxon_p", "cohens_d"], out)


def exclude_unlabeled(rows: list[ScoreRow]) -> tuple[list[ScoreRow], dict[str, int]]:
    """Drop rows whose grouping labels are unknown; report per-axis counts."""
    warnings = {}
    kept = rows
    for axis, labels in GROUP_AXES.items():
        bad = [r for r in kept if getattr(r, axis) not in labels]
        if bad:
            warnings[axis] = len(bad)
            kept = [r for r in kept if getattr(r, axis) in labels]
    return kept, warnings


def run_analysis(rows: list[ScoreRow], out_dir: Path, delta: float,
                 resamples: int, seed: int, log_popularity: bool,
                 jobs: int = 1,
                 detailed_rows: list[ScoreRow] | None = None) -> dict[str, int]:
    out_dir.mkdir(parents=True, exist_ok=True)
    labeled, warnings = exclude_unlabeled(rows)

    write_trend_table(labeled, out_dir / "trend.csv", log_popularity)
    write_groups_table(labeled, out_dir / "groups.csv")
    write_equivalence_table(labeled, out_dir / "equivalence.csv", delta,
                            resamples, seed, jobs)
    write_correlation_table(labeled, out_dir / "correlation.csv")
    if detailed_rows is not None:
        write_paired_table(labeled, detailed_rows, out_dir / "paired.csv")

    (out_dir / "run_config.json").write_text(json.dumps({
        "delta": delta,
        "resamples": resamples,
        "seed": seed,
        "log_popularity": log_popularity,
    }, indent=2) + "\n")
    return warnings
