"""End-to-end tests for the command-line pipeline"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from app.cli import build_parser, main
from app.core.data.table import read_table
from tests.oracles import HYBRID_SCHEMA, hybrid_sample, with_holes

SCHEMA_LINES = [f"{name} = {kind.value}" for name, kind in HYBRID_SCHEMA.items()]


def write_run(directory: Path, data: str = "data.csv", extra: tuple = ()) -> Path:
    lines = [
        "[run]",
        "label = hybrid",
        "",
        "[data]",
        f"path = {data}",
        "",
        "[schema]",
        *SCHEMA_LINES,
        "",
        "[preprocess]",
        "k = 5",
        "transforms = none, yeo_johnson, ordered_quantile",
        "",
        "[search]",
        "restarts = 3",
        "seed = 1",
        "",
        "[averaging]",
        "replicates = 20",
        "seed = 1",
        "",
        "[cv]",
        "folds = 3",
        *extra,
    ]
    path = directory / "run.ini"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def workspace(tmp_path):
    hybrid_sample(300, seed=5).to_csv(tmp_path / "data.csv")
    with_holes(hybrid_sample(300, seed=6), 0.05, seed=6, columns=["W", "X"]).to_csv(tmp_path / "holes.csv")
    (tmp_path / "domains.csv").write_text("A,Society\nB,Society\nW,Climate\nX,Landscape\nY,Landscape\nZ,Climate\n")
    write_run(tmp_path)
    return tmp_path


def run_cli(*argv) -> int:
    return main([str(arg) for arg in argv])


def body(path: Path) -> dict:
    return json.loads(path.read_text())


class TestParser:
    def test_every_stage_is_a_subcommand(self):
        parser = build_parser()
        for command in ("preprocess", "learn", "average", "analyze", "cv"):
            args = parser.parse_args([command, "--config", "run.ini", "--out", "o", *(["--network", "n.json"] if command == "analyze" else [])])
            assert args.command == command

        assert build_parser().parse_args(["compare", "a", "b", "--out", "o"]).runs == [Path("a"), Path("b")]

    def test_missing_command_is_usage_error(self):
        assert run_cli() == 1

    def test_unknown_flag_is_usage_error(self, workspace):
        assert run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "o", "--bogus") == 1

    def test_bad_choice_is_usage_error(self, workspace):
        assert run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "o", "--score", "mdl") == 1


class TestStages:
    def test_preprocess_fills_holes(self, workspace):
        out = workspace / "clean"

        code = run_cli("preprocess", "--config", workspace / "run.ini", "--out", out, "--data", workspace / "holes.csv")

        assert code == 0
        cleaned = read_table(out / "cleaned.csv", HYBRID_SCHEMA)
        assert cleaned.is_complete
        assert cleaned.n_rows == 300
        report = body(out / "preprocess.json")
        assert report["imputation"]["cells_imputed"] > 0
        assert set(report["imputation"]["per_column"]) <= {"W", "X"}
        assert {t["column"] for t in report["transforms"]} == {"W", "X", "Y", "Z"}
        assert report["run"]["digest"] == body(out / "resolved_config.json")["digest"]

    def test_preprocess_complete_data_without_transforms_is_identity(self, workspace):
        config = workspace / "run.ini"
        config.write_text(config.read_text().replace("transforms = none, yeo_johnson, ordered_quantile", "transforms = none"))
        out = workspace / "same"

        assert run_cli("preprocess", "--config", config, "--out", out) == 0

        original = read_table(workspace / "data.csv", HYBRID_SCHEMA)
        cleaned = read_table(out / "cleaned.csv", HYBRID_SCHEMA)
        for column in ("A", "B"):
            assert list(cleaned.frame[column]) == list(original.frame[column])
        for column in ("W", "X", "Y", "Z"):
            np.testing.assert_allclose(cleaned.values(column), original.values(column), rtol=1e-12)
        assert body(out / "preprocess.json")["imputation"]["cells_imputed"] == 0

    def test_whitelisted_pair_has_full_strength(self, workspace):
        (workspace / "allow.txt").write_text("W,Z\n")
        out = workspace / "wl"

        code = run_cli("average", "--config", workspace / "run.ini", "--out", out, "--whitelist", workspace / "allow.txt")

        assert code == 0
        strengths = pd.read_csv(out / "strengths.csv")
        row = strengths[(strengths["from"] == "W") & (strengths["to"] == "Z")]
        assert len(row) == 1
        assert row["strength"].iloc[0] == 1.0

    def test_learn_refuses_incomplete_data(self, workspace):
        code = run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "o", "--data", workspace / "holes.csv")

        assert code == 2

    def test_learn_writes_structure_and_summary(self, workspace):
        out = workspace / "learn"

        assert run_cli("learn", "--config", workspace / "run.ini", "--out", out) == 0

        dag = body(out / "dag.json")
        assert [n["name"] for n in dag["nodes"]] == list(HYBRID_SCHEMA)
        assert dag["edges"]
        assert dag["trace"]["final_score"] >= dag["trace"]["initial_score"]
        assert len(dag["trace"]["restarts"]) == 3
        summary = body(out / "summary.json")
        assert summary["label"] == "hybrid"
        assert summary["bic"] < summary["loglik"]
        assert summary["aic"] == pytest.approx(summary["loglik"] - summary["n_params"])
        assert summary["n_obs"] == 300
        assert "digest" in (out / "dag.dot").read_text()
        assert (out / "model.json").exists()

    def test_seed_flag_changes_the_trace(self, workspace):
        run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "s1")
        run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "s2", "--seed", "2")

        first, second = body(workspace / "s1" / "dag.json"), body(workspace / "s2" / "dag.json")
        assert first["run"]["config"]["search"]["seed"] == 1
        assert second["run"]["config"]["search"]["seed"] == 2
        assert first["run"]["digest"] != second["run"]["digest"]
        perturbations = lambda doc: [r["perturbation"] for r in doc["trace"]["restarts"]]  # noqa: E731
        assert perturbations(first) != perturbations(second)

    def test_run_replays_from_resolved_config(self, workspace):
        first, replay = workspace / "first", workspace / "replay"
        assert run_cli("learn", "--config", workspace / "run.ini", "--out", first, "--seed", "7", "--label", "orig") == 0

        assert run_cli("learn", "--config", first / "resolved_config.json", "--out", replay) == 0

        for artifact in ("dag.json", "dag.dot", "summary.json", "model.json", "resolved_config.json"):
            assert (first / artifact).read_bytes() == (replay / artifact).read_bytes()
        assert body(replay / "dag.json")["run"]["config"]["search"]["seed"] == 7

    def test_tampered_resolved_config_is_usage_error(self, workspace):
        out = workspace / "first"
        run_cli("learn", "--config", workspace / "run.ini", "--out", out)
        resolved = body(out / "resolved_config.json")
        resolved["config"]["search"]["restarts"] = 0
        (workspace / "edited.json").write_text(json.dumps(resolved))

        assert run_cli("learn", "--config", workspace / "edited.json", "--out", workspace / "again") == 1

    def test_average_is_reproducible(self, workspace):
        for name in ("a1", "a2"):
            assert run_cli("average", "--config", workspace / "run.ini", "--out", workspace / name) == 0

        for artifact in ("averaged.json", "strengths.csv", "averaged.dot", "summary.json", "resolved_config.json"):
            assert (workspace / "a1" / artifact).read_bytes() == (workspace / "a2" / artifact).read_bytes()

        strengths = (workspace / "a1" / "strengths.csv").read_text().splitlines()
        assert strengths[0] == "from,to,strength,direction"
        assert body(workspace / "a1" / "averaged.json")["replicates"] == 20

    def test_average_is_independent_of_workers(self, workspace):
        run_cli("average", "--config", workspace / "run.ini", "--out", workspace / "w1")
        run_cli("average", "--config", workspace / "run.ini", "--out", workspace / "w3", "--workers", "3")

        assert (workspace / "w1" / "strengths.csv").read_bytes() == (workspace / "w3" / "strengths.csv").read_bytes()

    def test_analyze_learned_and_averaged(self, workspace):
        run_cli("learn", "--config", workspace / "run.ini", "--out", workspace / "learn")
        run_cli("average", "--config", workspace / "run.ini", "--out", workspace / "avg")

        for network in (workspace / "learn" / "dag.json", workspace / "avg" / "averaged.json"):
            out = workspace / f"report_{network.stem}"
            code = run_cli(
                "analyze", "--config", workspace / "run.ini", "--out", out,
                "--network", network, "--domains", workspace / "domains.csv",
            )
            assert code == 0
            assert (out / "report.md").read_text().startswith("# Network report")
            assert body(out / "report.json")["nodes"] == len(HYBRID_SCHEMA)
            assert (out / "network.dot").read_text().startswith("//")

    def test_analyze_missing_network(self, workspace):
        code = run_cli(
            "analyze", "--config", workspace / "run.ini", "--out", workspace / "r",
            "--network", workspace / "missing.json",
        )

        assert code == 2

    def test_cv_with_fixed_structure(self, workspace):
        out = workspace / "learn"
        run_cli("learn", "--config", workspace / "run.ini", "--out", out)

        assert run_cli("cv", "--config", workspace / "run.ini", "--out", out, "--structure", out / "dag.json") == 0

        report = body(out / "cv_report.json")
        assert report["mode"] == "fixed"
        assert sorted(report["per_node_mse"]) == ["W", "X", "Y", "Z"]
        assert report["posterior_mse"] > 0
        assert "Posterior MSE" in (out / "cv_report.txt").read_text()

    def test_cv_relearn(self, workspace):
        out = workspace / "cv"

        code = run_cli("cv", "--config", workspace / "run.ini", "--out", out, "--relearn", "--restarts", "0")

        assert code == 0
        assert body(out / "cv_report.json")["mode"] == "relearn"

    def test_cv_without_structure_is_usage_error(self, workspace):
        assert run_cli("cv", "--config", workspace / "run.ini", "--out", workspace / "cv") == 1

    def test_compare_ranks_runs(self, workspace):
        write_run(workspace, extra=("", "[constraints]", "strategy = 1")).rename(workspace / "constrained.ini")
        write_run(workspace)
        runs = []
        for label, config in (("free", "run.ini"), ("constrained", "constrained.ini")):
            out = workspace / label
            run_cli("learn", "--config", workspace / config, "--out", out, "--label", label)
            run_cli("cv", "--config", workspace / config, "--out", out, "--structure", out / "dag.json")
            runs.append(out)

        assert run_cli("compare", *runs, "--out", workspace / "cmp") == 0

        table = body(workspace / "cmp" / "comparison.json")
        labels = [row["label"] for row in table["rows"]]
        assert sorted(labels) == ["constrained", "free"]
        assert table["rows"][0]["bic"] >= table["rows"][1]["bic"]
        assert table["rows"][0]["bic_rank"] == 1
        assert "Posterior MSE" in (workspace / "cmp" / "comparison.txt").read_text()

    def test_compare_missing_artifacts(self, workspace):
        (workspace / "empty").mkdir()

        assert run_cli("compare", workspace / "empty", "--out", workspace / "cmp") == 1


class TestConfigFailures:
    def test_invalid_run_file(self, workspace):
        (workspace / "bad.ini").write_text("[search]\nrestarts = many\n")

        assert run_cli("learn", "--config", workspace / "bad.ini", "--out", workspace / "o") == 1

    def test_missing_run_file(self, workspace):
        assert run_cli("learn", "--config", workspace / "nope.ini", "--out", workspace / "o") == 1

    def test_invalid_override(self, workspace):
        code = run_cli("average", "--config", workspace / "run.ini", "--out", workspace / "o", "--strength-threshold", "0.4")

        assert code == 1
