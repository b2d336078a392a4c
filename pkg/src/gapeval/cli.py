"""`gap` command line: validate a benchmark, score it, analyze the scores.

Exit codes: 0 success, 1 domain failure (violations, nothing scorable),
2 usage or I/O failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import GapError
from .interchange import load_manifest
from .pipeline import (
    ERRORS_NAME,
    SCORES_NAME,
    RunConfig,
    read_scores_csv,
    run_score,
    write_errors_sidecar,
    write_scores_csv,
)
from .report import run_analysis
from .validation import collect_violations


@click.group()
def main():
    """Landmark-alignment scoring and geo-equity analysis."""


@main.command()
@click.argument("manifest", type=click.Path(path_type=Path))
@click.option("--features", type=click.Path(path_type=Path), default=None,
              help="Feature directory to validate (default: <manifest dir>/"
                   "features when it exists).")
def validate(manifest: Path, features: Path | None):
    """List every schema violation in MANIFEST and its feature files."""
    try:
        violations = collect_violations(manifest, features)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for violation in violations:
        click.echo(violation)
    if violations:
        click.echo(f"{len(violations)} violation(s) found", err=True)
        sys.exit(1)
    click.echo("OK")


@main.command()
@click.option("--manifest", "-m", required=True,
              type=click.Path(path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--features", type=click.Path(path_type=Path), default=None)
@click.option("--subset", default=None,
              help="Comma-separated attraction ids to score.")
@click.option("--jobs", default=1, show_default=True)
@click.option("--tau", type=float, default=None,
              help="Override the manifest's detailness scale.")
@click.option("--beta", type=float, default=None,
              help="Override the manifest's density scale.")
@click.option("--n-frames", type=int, default=None)
@click.option("--judge", type=click.Path(path_type=Path), default=None,
              help="VLM judge score file (default: <features>/judge.json).")
@click.option("--human", type=click.Path(path_type=Path), default=None,
              help="Human judge score file (default: <features>/human.json).")
@click.option("--quality", type=click.Path(path_type=Path), default=None,
              help="Quality score file (default: <features>/quality.json).")
def score(manifest, out_dir, features, subset, jobs, tau, beta, n_frames,
          judge, human, quality):
    """Compute per-video metrics and write the score table."""
    try:
        benchmark = load_manifest(manifest)
        config = RunConfig(
            manifest=manifest, out_dir=out_dir, features_dir=features,
            n_frames=n_frames, tau=tau, beta=beta, jobs=jobs,
            subset=tuple(s for s in (subset or "").split(",") if s),
        )
        rows, errors = run_score(benchmark, config, judge_path=judge,
                                 human_path=human, quality_path=quality)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except GapError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_scores_csv(out_dir / SCORES_NAME, rows)
    write_errors_sidecar(out_dir / ERRORS_NAME, errors)
    for err in errors:
        click.echo(f"warning: {err['id']} [{err['stage']}]: {err['error']}",
                   err=True)

    scored = sum(1 for r in rows
                 if r.patch_clip is not None or r.keypoint is not None)
    click.echo(f"scored {scored}/{len(rows)} attractions -> "
               f"{out_dir / SCORES_NAME}")
    if scored == 0:
        click.echo("error: no attraction could be scored", err=True)
        sys.exit(1)


@main.command()
@click.option("--scores", "scores_path", required=True,
              type=click.Path(path_type=Path),
              help="Score table (the short-prompt run when paired analysis "
                   "is requested).")
@click.option("--scores-detailed", "detailed_path",
              type=click.Path(path_type=Path), default=None,
              help="Detailed-prompt score table for paired comparison.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path))
@click.option("--delta", default=1.0, show_default=True,
              help="Equivalence margin on the score scale.")
@click.option("--boot-b", "resamples", default=10_000, show_default=True,
              help="Bootstrap resamples.")
@click.option("--seed", default=0, show_default=True)
@click.option("--log-popularity", is_flag=True,
              help="Use log10(1+pageviews) as the trend x-variable.")
@click.option("--jobs", default=1, show_default=True)
def analyze(scores_path, detailed_path, out_dir, delta, resamples, seed,
            log_popularity, jobs):
    """Run the statistical analyses and write report tables."""
    try:
        rows = read_scores_csv(scores_path)
        detailed_rows = (read_scores_csv(detailed_path)
                         if detailed_path is not None else None)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        warnings = run_analysis(rows, out_dir, delta=delta,
                                resamples=resamples, seed=seed,
                                log_popularity=log_popularity, jobs=jobs,
                                detailed_rows=detailed_rows)
    except GapError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for axis, count in warnings.items():
        click.echo(f"warning: {count} row(s) without a valid '{axis}' label "
                   "excluded", err=True)
    click.echo(f"reports written to {out_dir}")


if __name__ == "__main__":
    main()
