"""Statistical analyses over a score table: metric-popularity trends,
regional group summaries, bootstrap equivalence tests, and paired
prompt-specificity comparisons."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, stdtr

from .errors import ContractError, DegenerateDataError
from .interchange import CONTINENTS, NORTH_SOUTH, WEST_EAST

METRICS = ("quality", "patch_clip", "keypoint", "vlm_avg", "human_avg")

GROUP_AXES = {
    "continent": CONTINENTS,
    "north_south": NORTH_SOUTH,
    "west_east": WEST_EAST,
}

# Resamples are generated in fixed-size chunks, each from its own
# counter-derived stream, so results do not depend on the worker count.
_BOOT_CHUNK = 256


@dataclass(frozen=True)
class ScoreRow:
    id: str
    name: str = ""
    city: str = ""
    country: str = ""
    continent: str = ""
    north_south: str = ""
    west_east: str = ""
    pageviews: int = 0
    category: str = ""
    patch_clip: float | None = None
    keypoint: float | None = None
    vlm_avg: float | None = None
    human_avg: float | None = None
    quality: float | None = None


@dataclass(frozen=True)
class TrendResult:
    srcc: float
    srcc_p: float
    slope: float
    slope_p: float
    n: int


@dataclass(frozen=True)
class GroupSummary:
    label: str
    n: int
    mean: float
    std: float
    degenerate: bool = False


@dataclass(frozen=True)
class EquivalenceResult:
    group_a: str
    group_b: str
    mean_diff: float
    ci_low: float
    ci_high: float
    delta: float
    equivalent: bool
    resamples: int
    seed: int


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p: float
    n_used: int
    degenerate: bool = False


@dataclass(frozen=True)
class PairedComparisonResult:
    mean_a: float
    mean_b: float
    wilcoxon_p: float
    cohens_d: float | None
    n_pairs: int


def rank_average(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    sv = v[order]
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _paired_float_arrays(x, y, min_n: int) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or len(xa) != len(ya):
        raise ContractError("inputs must be 1-d sequences of equal length")
    if len(xa) < min_n:
        raise ContractError(f"need at least {min_n} observations, got {len(xa)}")
    return xa, ya


def spearman(x, y) -> tuple[float, float]:
    """Rank correlation with average ranks for ties; two-sided p from the
    Student-t transform with n-2 degrees of freedom."""
    xa, ya = _paired_float_arrays(x, y, 3)
    n = len(xa)
    rx = rank_average(xa)
    ry = rank_average(ya)
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    sxx = float(cx @ cx)
    syy = float(cy @ cy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("zero rank variance; correlation undefined")
    rho = float(cx @ cy) / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return rho, min(p, 1.0)


def ols_trend(x, y) -> tuple[float, float]:
    """(slope, two-sided p) of the least-squares line, p from the slope
    t-statistic with n-2 degrees of freedom."""
    xa, ya = _paired_float_arrays(x, y, 3)
    n = len(xa)
    cx = xa - xa.mean()
    sxx = float(cx @ cx)
    if sxx == 0.0:
        raise ContractError("x has zero variance; slope undefined")
    slope = float(cx @ (ya - ya.mean())) / sxx
    resid = ya - (ya.mean() + slope * cx)
    rss = float(resid @ resid)
    if rss == 0.0:
        return slope, (0.0 if slope != 0.0 else 1.0)
    se = math.sqrt(rss / (n - 2) / sxx)
    t = slope / se
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return slope, min(p, 1.0)


def popularity_trend(x, y) -> TrendResult:
    rho, rho_p = spearman(x, y)
    slope, slope_p = ols_trend(x, y)
    return TrendResult(srcc=rho, srcc_p=rho_p, slope=slope, slope_p=slope_p,
                       n=len(x))


def group_summary(rows: list[ScoreRow], metric: str,
                  grouping: str) -> list[GroupSummary]:
    """Count, mean and sample standard deviation per group label, over rows
    where the metric is present. Empty groups are omitted; singleton groups
    report std 0 with a degenerate flag."""
    if grouping not in GROUP_AXES:
        raise ContractError(f"grouping must be one of {sorted(GROUP_AXES)}, "
                            f"got '{grouping}'")
    if metric not in METRICS:
        raise ContractError(f"metric must be one of {METRICS}, got '{metric}'")
    out = []
    for label in GROUP_AXES[grouping]:
        vals = [getattr(r, metric) for r in rows
                if getattr(r, grouping) == label
                and getattr(r, metric) is not None]
        if not vals:
            continue
        arr = np.asarray(vals, dtype=np.float64)
        if len(arr) == 1:
            out.append(GroupSummary(label=label, n=1, mean=float(arr[0]),
                                    std=0.0, degenerate=True))
        else:
            out.append(GroupSummary(label=label, n=len(arr),
                                    mean=float(arr.mean()),
                                    std=float(arr.std(ddof=1))))
    return out


def interval_within_margin(ci_low: float, ci_high: float,
                           delta: float) -> bool:
    """The equivalence decision: the whole interval inside [-delta, +delta]."""
    return -delta <= ci_low and ci_high <= delta


def _bootstrap_chunk(a: np.ndarray, b: np.ndarray, seed: int, chunk: int,
                     size: int, key_a: int, key_b: int) -> np.ndarray:
    rng_a = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(chunk, key_a)))
    rng_b = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(chunk, key_b)))
    idx_a = rng_a.integers(0, len(a), size=(size, len(a)))
    idx_b = rng_b.integers(0, len(b), size=(size, len(b)))
    return a[idx_a].mean(axis=1) - b[idx_b].mean(axis=1)


def bootstrap_equivalence(a, b, delta: float, resamples: int = 10_000,
                          seed: int = 0, jobs: int = 1,
                          group_a: str = "a",
                          group_b: str = "b") -> EquivalenceResult:
    """Percentile-bootstrap CI of mean(a) - mean(b); equivalent when the
    95% interval lies inside [-delta, +delta].

    Each fixed-size chunk of resamples draws from streams derived from
    (seed, chunk index), so the result is identical for any `jobs`. Each
    group's stream is keyed by the label order, so swapping the groups
    (with their labels) negates every resampled difference exactly.
    """
    aa = np.asarray(a, dtype=np.float64)
    bb = np.asarray(b, dtype=np.float64)
    if len(aa) < 2 or len(bb) < 2:
        raise ContractError("both groups need at least 2 observations")
    if delta <= 0:
        raise ContractError(f"delta must be > 0, got {delta}")
    if resamples < 1000:
        raise ContractError(f"need at least 1000 resamples, got {resamples}")
    if seed < 0:
        raise ContractError(f"seed must be >= 0, got {seed}")

    key_a, key_b = (0, 1) if group_a <= group_b else (1, 0)
    spans = [(start, min(start + _BOOT_CHUNK, resamples))
             for start in range(0, resamples, _BOOT_CHUNK)]
    diffs = np.empty(resamples, dtype=np.float64)

    def run(task):
        chunk, (start, stop) = task
        diffs[start:stop] = _bootstrap_chunk(aa, bb, seed, chunk, stop - start,
                                             key_a, key_b)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run, enumerate(spans)))
    else:
        for task in enumerate(spans):
            run(task)

    ci_low, ci_high = (float(v) for v in np.percentile(diffs, [2.5, 97.5]))
    return EquivalenceResult(
        group_a=group_a, group_b=group_b,
        mean_diff=float(aa.mean() - bb.mean()),
        ci_low=ci_low, ci_high=ci_high, delta=delta,
        equivalent=interval_within_margin(ci_low, ci_high, delta),
        resamples=resamples, seed=seed,
    )


def wilcoxon_signed_rank(a, b, method: str = "approx") -> WilcoxonResult:
    """Two-sided signed-rank test on paired samples.

    Zero differences are dropped. "approx" uses the normal approximation
    with tie-corrected variance and a 0.5 continuity correction; "exact"
    enumerates the sign-assignment distribution (valid with ties, n <= 50).
    All differences zero is reported as p = 1 with a degenerate flag.
    """
    aa, bb = _paired_float_arrays(a, b, 1)
    d = aa - bb
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(statistic=0.0, p=1.0, n_used=0, degenerate=True)
    ranks = rank_average(np.abs(d))
    t_plus = float(ranks[d > 0].sum())

    if method == "approx":
        mn = n * (n + 1) * 0.25
        var24 = float(n * (n + 1) * (2 * n + 1))
        _, counts = np.unique(ranks, return_counts=True)
        var24 -= 0.5 * float((counts.astype(np.float64) ** 3 - counts).sum())
        se = math.sqrt(var24 / 24.0)
        if se == 0.0:
            return WilcoxonResult(statistic=t_plus, p=1.0, n_used=n,
                                  degenerate=True)
        cc = 0.5 * math.copysign(1.0, t_plus - mn) if t_plus != mn else 0.0
        z = (t_plus - mn - cc) / se
        p = 2.0 * float(ndtr(-abs(z)))
        return WilcoxonResult(statistic=t_plus, p=min(p, 1.0), n_used=n)

    if method == "exact":
        if n > 50:
            raise ContractError(f"exact method supports n <= 50, got {n}")
        # Doubled ranks are integers even with .5 average ranks. counts[s]
        # is the number of sign assignments whose positive-rank sum is s/2.
        r2 = np.rint(2.0 * ranks).astype(np.int64)
        total = int(r2.sum())
        counts = np.zeros(total + 1, dtype=np.float64)
        counts[0] = 1.0
        for r in r2:
            counts[r:] += counts[:-r].copy()
        sums = np.arange(total + 1, dtype=np.float64) / 2.0
        center = total / 4.0
        mask = np.abs(sums - center) >= abs(t_plus - center) - 1e-9
        p = float(counts[mask].sum() / counts.sum())
        return WilcoxonResult(statistic=t_plus, p=min(p, 1.0), n_used=n)

    raise ContractError(f"unknown method '{method}'")


def cohens_d_paired(a, b) -> float:
    """Difference-score effect size: mean(a-b) / sd(a-b), sample sd."""
    aa, bb = _paired_float_arrays(a, b, 2)
    d = aa - bb
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateDataError("zero difference variance; effect size undefined")
    return float(d.mean()) / sd


def paired_comparison(a, b) -> PairedComparisonResult:
    """Wilcoxon p and paired Cohen's d for two aligned score vectors."""
    aa, bb = _paired_float_arrays(a, b, 2)
    wres = wilcoxon_signed_rank(aa, bb)
    try:
        d = cohens_d_paired(aa, bb)
    except DegenerateDataError:
        d = None
    return PairedComparisonResult(mean_a=float(aa.mean()),
                                  mean_b=float(bb.mean()),
                                  wilcoxon_p=wres.p, cohens_d=d,
                                  n_pairs=len(aa))


def metric_correlation_matrix(
        rows: list[ScoreRow]) -> dict[tuple[str, str], tuple[float, float, int] | None]:
    """Pairwise-complete SRCC among the score columns.

    Entries are (rho, p, n) or None when fewer than 3 complete pairs exist
    or the correlation is undefined on them.
    """
    out: dict[tuple[str, str], tuple[float, float, int] | None] = {}
    for i, ma in enumerate(METRICS):
        for mb in METRICS[i:]:
            pairs = [(getattr(r, ma), getattr(r, mb)) for r in rows
                     if getattr(r, ma) is not None
                     and getattr(r, mb) is not None]
            if len(pairs) < 3:
                out[(ma, mb)] = None
                continue
            xs, ys = zip(*pairs)
            try:
                rho, p = spearman(xs, ys)
            except DegenerateDataError:
                out[(ma, mb)] = None
                continue
            out[(ma, mb)] = (rho, p, len(pairs))
    return out
