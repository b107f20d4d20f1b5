import csv
import json

import pytest

from conftest import data_file
from ytanalytics import pipeline as pl
from ytanalytics.cli import EXIT_DATA, EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main
from ytanalytics.coverage import CoverageReport

DEMO = str(data_file("demo_corpus.csv"))
FAST = ["--topic-candidates", "1-3", "--folds", "2", "--lda-iters", "60", "--heldout-sweeps", "10"]


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert main(["run", "--corpus", DEMO, "--out", str(out), "--seed", "3"]) == EXIT_OK
    return out


def test_demo_report_sections(demo_run):
    report = json.loads((demo_run / "report.json").read_text(encoding="utf-8"))
    assert {"sentiment", "toxicity", "topics", "coverage", "config", "corpus"} <= set(report)
    assert report["corpus"]["videos"] == 12
    assert sum(report["sentiment"]["counts"].values()) == 12
    assert sum(report["topics"]["videos_per_topic"]) == 12
    cov = report["coverage"]
    assert 0.0 <= cov["aggregate"] <= 1.0 and cov["cumulative_final"] == cov["aggregate"]
    assert all(0.0 <= v <= 1.0 for v in cov["by_size"].values())
    assert "out" not in report["config"]


def test_demo_artifacts_consistent(demo_run):
    profiles = _read_csv(demo_run / "profiles.csv")
    assert len(profiles) == 12
    recs = _read_csv(demo_run / "recommendations.csv")
    by_q = {}
    for row in recs:
        by_q.setdefault(row["query_id"], []).append(row["rec_id"])
    assert all(len(v) <= 5 for v in by_q.values())
    prof = {p["video_id"]: (p["sentiment"], p["toxicity"], p["topic"]) for p in profiles}
    assert all(prof[q] == prof[r] for q, rs in by_q.items() for r in rs)
    cum = _read_csv(demo_run / "coverage_cumulative.csv")
    assert len(cum) == 12
    resolved = json.loads((demo_run / "resolved_config.json").read_text(encoding="utf-8"))
    assert resolved["seed"] == 3 and resolved["corpus"] == DEMO


def test_stepwise_commands_match_run(demo_run, tmp_path):
    common = ["--corpus", DEMO, "--seed", "3"]
    assert main(["analyze", *common, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert (tmp_path / "a" / "profiles.csv").read_bytes() == (demo_run / "profiles.csv").read_bytes()
    prof = str(tmp_path / "a" / "profiles.csv")
    assert main(["recommend", *common, "--profiles", prof, "--out", str(tmp_path / "r")]) == EXIT_OK
    assert (tmp_path / "r" / "recommendations.csv").read_bytes() == \
        (demo_run / "recommendations.csv").read_bytes()
    assert main(["coverage", *common, "--profiles", prof, "--out", str(tmp_path / "c"),
                 "--recommendations", str(tmp_path / "r" / "recommendations.csv")]) == EXIT_OK
    for name in ("coverage_by_size.csv", "coverage_monthly.csv", "coverage_cumulative.csv"):
        assert (tmp_path / "c" / name).read_bytes() == (demo_run / name).read_bytes()


def test_ingest_command(tmp_path):
    assert main(["ingest", "--corpus", DEMO, "--out", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "ingest.json").read_text(encoding="utf-8"))
    assert summary["videos"] == 12 and summary["rejected_rows"] == []
    assert (tmp_path / "corpus.csv").exists()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": DEMO, "top_k": 3, "seed": 1}), encoding="utf-8")
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--seed", "4", "--out", str(out), *FAST]) == EXIT_OK
    resolved = json.loads((out / "resolved_config.json").read_text(encoding="utf-8"))
    assert resolved["top_k"] == 3 and resolved["seed"] == 4


def test_lda_seed_alias(tmp_path):
    assert main(["analyze", "--corpus", DEMO, "--lda-seed", "9", "--out", str(tmp_path), *FAST]) == EXIT_OK
    assert json.loads((tmp_path / "resolved_config.json").read_text(encoding="utf-8"))["seed"] == 9


def test_unfiltered_mode_never_below_paper_mode(tmp_path):
    agg = {}
    for mode in ("paper", "unfiltered"):
        out = tmp_path / mode
        assert main(["run", "--corpus", DEMO, "--out", str(out), "--filter-mode", mode, *FAST]) == EXIT_OK
        agg[mode] = json.loads((out / "report.json").read_text(encoding="utf-8"))["coverage"]["aggregate"]
    assert agg["paper"] <= agg["unfiltered"]


def test_external_toxicity_scores(tmp_path):
    ids = [row["video_id"] for row in _read_csv(DEMO)]
    scores = tmp_path / "tox.csv"
    scores.write_text("video_id,score\n" + "".join(f"{v},0.9\n" for v in ids[:4]), encoding="utf-8")
    out = tmp_path / "o"
    assert main(["analyze", "--corpus", DEMO, "--tox-scores", str(scores), "--out", str(out),
                 *FAST]) == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["toxicity"]["score_source"] == {"external": 4, "lexicon": 8}
    assert report["toxicity"]["counts"]["toxic"] >= 4


def test_synth_command(tmp_path):
    out = tmp_path / "s" / "c.csv"
    assert main(["synth", "--output", str(out), "--n", "25", "--toxic-fraction", "0.2", "--seed", "1"]) == EXIT_OK
    assert len(_read_csv(out)) == 25 and (tmp_path / "s" / "c.truth.csv").exists()
    assert main(["synth", "--output", str(out), "--sentiment-mix", "1,1,1"]) == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["run"],
    ["run", "--corpus", DEMO, "--top-k", "0"],
    ["run", "--corpus", DEMO, "--topics", "many"],
    ["run", "--corpus", DEMO, "--tox-threshold", "1.5"],
    ["run", "--corpus", DEMO, "--filter-mode", "sideways"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(argv, tmp_path):
    # argparse rejections exit directly; config validation returns the code
    try:
        code = main([*argv, "--out", str(tmp_path)] if argv[0] == "run" else argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_unknown_config_key_exit_1(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": DEMO, "colour": "blue"}), encoding="utf-8")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_USAGE


def test_data_errors_exit_2(tmp_path):
    assert main(["run", "--corpus", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == EXIT_DATA
    bad = tmp_path / "bad.csv"
    bad.write_text("video_id,title\nv1,t\n", encoding="utf-8")
    assert main(["ingest", "--corpus", str(bad), "--out", str(tmp_path)]) == EXIT_DATA
    rows = tmp_path / "rows.csv"
    rows.write_text("video_id,title,description,publish_date\nv1,t,d,2023-01-01\nv2,t,d,yesterday\n",
                    encoding="utf-8")
    assert main(["ingest", "--corpus", str(rows), "--out", str(tmp_path / "lenient")]) == EXIT_OK
    assert main(["ingest", "--corpus", str(rows), "--strict", "--out", str(tmp_path)]) == EXIT_DATA
    tox = tmp_path / "tox.csv"
    tox.write_text("v1,1.5\n", encoding="utf-8")
    assert main(["analyze", "--corpus", DEMO, "--tox-scores", str(tox), "--out", str(tmp_path)]) == EXIT_DATA


def test_degenerate_corpus_is_a_data_error(tmp_path):
    same = tmp_path / "same.csv"
    same.write_text("video_id,title,description,publish_date\n" +
                    "".join(f"v{i},t,same words here,2023-01-0{i + 1}\n" for i in range(5)),
                    encoding="utf-8")
    # every term is in every document, so the default max_df leaves no vocabulary
    assert main(["run", "--corpus", str(same), "--out", str(tmp_path)]) == EXIT_DATA


def test_invariant_violation_exit_3(monkeypatch, tmp_path):
    def broken(report: CoverageReport):
        raise pl.InvariantViolation("coverage out of range")
    monkeypatch.setattr(pl, "check_coverage", broken)
    assert main(["run", "--corpus", DEMO, "--out", str(tmp_path), *FAST]) == EXIT_INVARIANT


def test_run_pipeline_without_writing(tmp_path):
    config = pl.PipelineConfig(corpus=DEMO, out=str(tmp_path / "never"), topics=2, lda_iters=50)
    report = pl.run_pipeline(config, write=False)
    assert report.analysis.model.k == 2 and report.analysis.selection is None
    assert not (tmp_path / "never").exists()
    assert json.loads(json.dumps(report.to_dict()))["topics"]["selection"] is None
