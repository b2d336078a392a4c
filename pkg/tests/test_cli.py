import json
import shutil
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from gapeval.cli import main
from gapeval.geo_stats import ScoreRow
from gapeval.pipeline import read_scores_csv, write_scores_csv

runner = CliRunner()


def run(*args):
    return runner.invoke(main, [str(a) for a in args])


def read_csv_rows(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


class TestValidate:
    def test_pristine_fixture(self, bench3):
        result = run("validate", bench3 / "manifest.json")
        assert result.exit_code == 0
        assert "OK" in result.output

    def test_four_frame_record(self, bench3_copy):
        manifest = bench3_copy / "manifest.json"
        doc = json.loads(manifest.read_text())
        doc["attractions"][0]["frames"] = doc["attractions"][0]["frames"][:4]
        manifest.write_text(json.dumps(doc))
        result = run("validate", manifest)
        assert result.exit_code == 1
        assert "expected 5 frames, got 4" in result.output

    def test_mask_index_gap(self, bench3_copy):
        (bench3_copy / "features" / "basalt-arch.r0.mask.png").unlink()
        result = run("validate", bench3_copy / "manifest.json")
        assert result.exit_code == 1
        assert "mask index gap" in result.output

    def test_missing_gt_image(self, bench3_copy):
        (bench3_copy / "images" / "basalt-arch.gt.png").unlink()
        result = run("validate", bench3_copy / "manifest.json")
        assert result.exit_code == 1
        assert "does not resolve" in result.output

    def test_corrupt_embedding(self, bench3_copy):
        path = bench3_copy / "features" / "cloud-pagoda.gt.emb"
        path.write_bytes(path.read_bytes()[:-8])
        result = run("validate", bench3_copy / "manifest.json")
        assert result.exit_code == 1
        assert "payload" in result.output

    def test_out_of_bounds_match(self, bench3_copy):
        path = bench3_copy / "features" / "basalt-arch.self.matches"
        path.write_text(path.read_text() + "-3.0 2.0 1.0 1.0 0.9\n")
        result = run("validate", bench3_copy / "manifest.json")
        assert result.exit_code == 1
        assert "outside image bounds" in result.output

    def test_duplicate_vlm_judge(self, bench3_copy):
        path = bench3_copy / "features" / "judge.json"
        doc = json.loads(path.read_text())
        doc.append(dict(doc[0]))
        path.write_text(json.dumps(doc))
        result = run("validate", bench3_copy / "manifest.json")
        assert result.exit_code == 1
        assert "duplicate VLM" in result.output

    def test_unreadable_path_exit_2(self, tmp_path):
        result = run("validate", tmp_path / "nope.json")
        assert result.exit_code == 2

    def test_explicit_missing_features_dir(self, bench3_copy, tmp_path):
        result = run("validate", bench3_copy / "manifest.json",
                     "--features", tmp_path / "nowhere")
        assert result.exit_code == 1
        assert "does not exist" in result.output


class TestScore:
    def test_full_fixture(self, bench3, tmp_path):
        out = tmp_path / "out"
        result = run("score", "--manifest", bench3 / "manifest.json",
                     "--out", out)
        assert result.exit_code == 0
        rows = read_scores_csv(out / "scores.csv")
        assert [r.id for r in rows] == ["basalt-arch", "cloud-pagoda",
                                        "sunstone-fort"]
        for row in rows:
            assert row.patch_clip is not None
            assert row.keypoint is not None and 0 <= row.keypoint < 2
            assert row.vlm_avg is not None
            assert row.human_avg is not None
            assert row.quality is not None
        assert json.loads((out / "score_errors.json").read_text()) == []

    def test_subset_filter(self, bench3, tmp_path):
        out = tmp_path / "out"
        result = run("score", "--manifest", bench3 / "manifest.json",
                     "--out", out, "--subset", "cloud-pagoda")
        assert result.exit_code == 0
        rows = read_scores_csv(out / "scores.csv")
        assert [r.id for r in rows] == ["cloud-pagoda"]

    def test_unknown_subset_id(self, bench3, tmp_path):
        result = run("score", "--manifest", bench3 / "manifest.json",
                     "--out", tmp_path / "out", "--subset", "nessie")
        assert result.exit_code == 1

    def test_corrupt_embedding_partial_row(self, bench3_copy, tmp_path):
        path = bench3_copy / "features" / "cloud-pagoda.gt.emb"
        path.write_bytes(path.read_bytes()[:-8])
        out = tmp_path / "out"
        result = run("score", "--manifest", bench3_copy / "manifest.json",
                     "--out", out)
        assert result.exit_code == 0
        rows = {r.id: r for r in read_scores_csv(out / "scores.csv")}
        assert rows["cloud-pagoda"].patch_clip is None
        assert rows["cloud-pagoda"].keypoint is not None
        assert rows["basalt-arch"].patch_clip is not None
        errors = json.loads((out / "score_errors.json").read_text())
        assert len(errors) == 1
        assert errors[0]["id"] == "cloud-pagoda"
        assert errors[0]["stage"] == "patch"

    def test_no_scorable_attraction_exit_1(self, bench3, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = run("score", "--manifest", bench3 / "manifest.json",
                     "--out", tmp_path / "out", "--features", empty)
        assert result.exit_code == 1

    def test_missing_manifest_exit_2(self, tmp_path):
        result = run("score", "--manifest", tmp_path / "nope.json",
                     "--out", tmp_path / "out")
        assert result.exit_code == 2

    def test_byte_identical_runs_and_jobs(self, bench3, tmp_path):
        outputs = []
        for name, jobs in (("a", 1), ("b", 1), ("c", 4)):
            out = tmp_path / name
            result = run("score", "--manifest", bench3 / "manifest.json",
                         "--out", out, "--jobs", jobs)
            assert result.exit_code == 0
            outputs.append((out / "scores.csv").read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_manifest_order_irrelevant(self, bench3_copy, tmp_path):
        manifest = bench3_copy / "manifest.json"
        doc = json.loads(manifest.read_text())
        doc["attractions"] = doc["attractions"][::-1]
        shuffled = bench3_copy / "shuffled.json"
        shuffled.write_text(json.dumps(doc))
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run("score", "--manifest", manifest, "--out", out_a,
                   ).exit_code == 0
        assert run("score", "--manifest", shuffled, "--out", out_b,
                   ).exit_code == 0
        assert (out_a / "scores.csv").read_bytes() == \
               (out_b / "scores.csv").read_bytes()

    def test_tau_beta_override_changes_keypoint(self, bench3, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run("score", "--manifest", bench3 / "manifest.json", "--out", out_a)
        run("score", "--manifest", bench3 / "manifest.json", "--out", out_b,
            "--beta", "50.0")
        a = {r.id: r.keypoint for r in read_scores_csv(out_a / "scores.csv")}
        b = {r.id: r.keypoint for r in read_scores_csv(out_b / "scores.csv")}
        assert all(b[i] < a[i] for i in a)


def synthetic_rows(rng, n=40, with_human=True):
    continents = ["Europe", "Asia", "Americas", "Africa", "Oceania"]
    rows = []
    for i in range(n):
        pv = int(rng.integers(1_000, 5_000_000))
        rows.append(ScoreRow(
            id=f"a{i:03d}", name=f"A{i}", city="c", country="x",
            continent=continents[i % 5],
            north_south="GlobalNorth" if i % 2 else "GlobalSouth",
            west_east="GlobalWest" if i % 3 else "GlobalEast",
            pageviews=pv, category="site",
            patch_clip=float(rng.uniform(0.3, 0.9)),
            keypoint=float(rng.uniform(0.2, 1.8)),
            vlm_avg=float(rng.integers(0, 11)) / 2.0,
            human_avg=float(rng.integers(0, 11)) / 2.0 if with_human else None,
            quality=float(rng.uniform(1, 5)),
        ))
    return rows


class TestAnalyze:
    def test_report_files_written(self, bench3, tmp_path):
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, synthetic_rows(np.random.default_rng(0)))
        out = tmp_path / "report"
        result = run("analyze", "--scores", scores, "--out", out,
                     "--boot-b", 1000)
        assert result.exit_code == 0
        for name in ("trend.csv", "groups.csv", "equivalence.csv",
                     "correlation.csv", "run_config.json"):
            assert (out / name).is_file()
        assert not (out / "paired.csv").exists()

    def test_byte_identical_runs_and_jobs(self, tmp_path):
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, synthetic_rows(np.random.default_rng(1)))
        blobs = []
        for name, jobs in (("r1", 1), ("r2", 1), ("r3", 4)):
            out = tmp_path / name
            result = run("analyze", "--scores", scores, "--out", out,
                         "--boot-b", 1000, "--seed", 7, "--jobs", jobs)
            assert result.exit_code == 0
            blobs.append(b"".join(sorted(
                p.read_bytes() for p in out.iterdir())))
        assert blobs[0] == blobs[1] == blobs[2]

    def test_planted_monotone_trend(self, tmp_path):
        rng = np.random.default_rng(2)
        rows = []
        base = synthetic_rows(rng, n=40)
        pageviews = sorted(r.pageviews for r in base)
        for rank, (row, pv) in enumerate(zip(base, pageviews)):
            rows.append(ScoreRow(
                id=row.id, continent=row.continent,
                north_south=row.north_south, west_east=row.west_east,
                pageviews=pv, patch_clip=rank + float(rng.normal(0, 0.5))))
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, rows)
        out = tmp_path / "report"
        assert run("analyze", "--scores", scores, "--out", out,
                   "--boot-b", 1000).exit_code == 0
        trend = {r["metric"]: r for r in read_csv_rows(out / "trend.csv")}
        assert float(trend["patch_clip"]["srcc"]) > 0.9

    def test_identical_groups_equivalent(self, tmp_path):
        values = [3.0, 3.4, 2.8, 3.2]
        rows = []
        for i, v in enumerate(values):
            for continent in ("Europe", "Asia"):
                rows.append(ScoreRow(
                    id=f"{continent}{i}", continent=continent,
                    north_south="GlobalNorth", west_east="GlobalWest",
                    pageviews=100, vlm_avg=v))
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, rows)
        out = tmp_path / "report"
        assert run("analyze", "--scores", scores, "--out", out,
                   "--boot-b", 1000).exit_code == 0
        eq = read_csv_rows(out / "equivalence.csv")
        pair = [r for r in eq if r["metric"] == "vlm_avg"
                and {r["group_a"], r["group_b"]} == {"Europe", "Asia"}]
        assert len(pair) == 1
        assert pair[0]["equivalent"] == "true"
        assert float(pair[0]["mean_diff"]) == 0.0

    def test_human_absent_policy(self, tmp_path):
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, synthetic_rows(np.random.default_rng(3),
                                                with_human=False))
        out = tmp_path / "report"
        assert run("analyze", "--scores", scores, "--out", out,
                   "--boot-b", 1000).exit_code == 0
        groups = read_csv_rows(out / "groups.csv")
        assert all(r["metric"] != "human_avg" for r in groups)
        assert any(r["metric"] == "vlm_avg" for r in groups)

    def test_paired_tables(self, tmp_path):
        rng = np.random.default_rng(4)
        short = synthetic_rows(rng, n=30)
        detailed = [ScoreRow(
            id=r.id, continent=r.continent, north_south=r.north_south,
            west_east=r.west_east, pageviews=r.pageviews,
            patch_clip=r.patch_clip + 0.02 + float(rng.normal(0, 0.01)),
            keypoint=r.keypoint, vlm_avg=r.vlm_avg, human_avg=r.human_avg,
            quality=r.quality) for r in short]
        p_short, p_detailed = tmp_path / "s.csv", tmp_path / "d.csv"
        write_scores_csv(p_short, short)
        write_scores_csv(p_detailed, detailed)
        out = tmp_path / "report"
        assert run("analyze", "--scores", p_short, "--scores-detailed",
                   p_detailed, "--out", out, "--boot-b", 1000).exit_code == 0
        paired = {r["metric"]: r for r in read_csv_rows(out / "paired.csv")}
        row = paired["patch_clip"]
        assert float(row["mean_detailed"]) > float(row["mean_short"])
        assert float(row["cohens_d"]) > 0
        assert float(row["wilcoxon_p"]) < 0.01

    def test_unlabeled_rows_excluded_with_warning(self, tmp_path):
        rows = synthetic_rows(np.random.default_rng(5), n=10)
        rows.append(ScoreRow(id="zz", continent="Narnia",
                             north_south="GlobalNorth",
                             west_east="GlobalWest", pageviews=5,
                             patch_clip=0.5))
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, rows)
        out = tmp_path / "report"
        result = run("analyze", "--scores", scores, "--out", out,
                     "--boot-b", 1000)
        assert result.exit_code == 0
        assert "without a valid 'continent'" in result.output
        trend = {r["metric"]: r for r in read_csv_rows(out / "trend.csv")}
        assert trend["patch_clip"]["n"] == "10"

    def test_missing_scores_exit_2(self, tmp_path):
        result = run("analyze", "--scores", tmp_path / "nope.csv",
                     "--out", tmp_path / "r")
        assert result.exit_code == 2

    def test_log_popularity_switch(self, tmp_path):
        scores = tmp_path / "scores.csv"
        write_scores_csv(scores, synthetic_rows(np.random.default_rng(6)))
        out_raw, out_log = tmp_path / "raw", tmp_path / "log"
        run("analyze", "--scores", scores, "--out", out_raw, "--boot-b", 1000)
        run("analyze", "--scores", scores, "--out", out_log, "--boot-b", 1000,
            "--log-popularity")
        raw = {r["metric"]: r for r in read_csv_rows(out_raw / "trend.csv")}
        log = {r["metric"]: r for r in read_csv_rows(out_log / "trend.csv")}
        # ranks unchanged by the monotone transform; the slope scale is not
        assert raw["patch_clip"]["srcc"] == log["patch_clip"]["srcc"]
        assert raw["patch_clip"]["slope"] != log["patch_clip"]["slope"]
