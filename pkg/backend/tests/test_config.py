"""Tests for run-file parsing and overrides"""

import json

import pytest

from app.config.run_config import (
    RunConfig,
    load_run_config,
    parse_resolved_config,
    parse_run_config,
    write_resolved,
)
from app.core.exceptions import ConfigError
from app.models.enums import NodeKind, ScoreCriterion, TransformKind


def run_file(*lines: str) -> str:
    return "\n".join(lines) + "\n"


FULL = run_file(
    "[run]",
    "label = survey",
    "workers = 4",
    "",
    "[data]",
    "path = survey.csv",
    "sentinel = -99",
    "percentage = forest, crops",
    "",
    "[schema]",
    "region = discrete",
    "forest = continuous",
    "crops = continuous",
    "",
    "[recode.region]",
    "north = N",
    "south = S",
    "",
    "[preprocess]",
    "k = 7",
    "transforms = none, log, ordered_quantile",
    "",
    "[constraints]",
    "strategy = 1",
    "blacklist = deny.txt",
    "",
    "[search]",
    "restarts = 5",
    "score = aic",
    "seed = 11",
    "max_parents =",
    "",
    "[averaging]",
    "replicates = 200",
    "strength_threshold = 0.8",
    "",
    "[cv]",
    "folds = 5",
    "relearn = true",
)


class TestParsing:
    def test_full_file(self):
        cfg = parse_run_config(FULL)

        assert cfg.run.label == "survey"
        assert cfg.run.workers == 4
        assert cfg.data.sentinel == "-99"
        assert cfg.data.percentage == ["forest", "crops"]
        assert list(cfg.schema_) == ["region", "forest", "crops"]
        assert cfg.schema_["region"] == NodeKind.DISCRETE
        assert cfg.recode == {"region": {"north": "N", "south": "S"}}
        assert cfg.preprocess.k == 7
        assert cfg.preprocess.transforms == [TransformKind.NONE, TransformKind.LOG, TransformKind.ORDERED_QUANTILE]
        assert cfg.constraints.strategy == 1
        assert cfg.search.restarts == 5
        assert cfg.search.score == ScoreCriterion.AIC
        assert cfg.search.seed == 11
        assert cfg.search.max_parents is None
        assert cfg.averaging.replicates == 200
        assert cfg.averaging.strength_threshold == 0.8
        assert cfg.cv.folds == 5
        assert cfg.cv.relearn is True
        assert cfg.cv.standardize is False

    def test_empty_file_gives_defaults(self):
        cfg = parse_run_config("")

        assert cfg == RunConfig()
        assert cfg.preprocess.transforms == list(TransformKind)
        assert cfg.data.path is None

    def test_relative_paths_resolve_against_base(self, tmp_path):
        cfg = parse_run_config(FULL, base=tmp_path)

        assert cfg.data.path == str(tmp_path / "survey.csv")
        assert cfg.constraints.blacklist == str(tmp_path / "deny.txt")
        assert cfg.constraints.whitelist is None

    def test_absolute_paths_are_kept(self, tmp_path):
        target = tmp_path / "elsewhere" / "data.csv"
        cfg = parse_run_config(run_file("[data]", f"path = {target}"), base=tmp_path / "configs")

        assert cfg.data.path == str(target)

    def test_inline_comments_are_stripped(self):
        cfg = parse_run_config(run_file("[search]", "restarts = 3  # a few"))

        assert cfg.search.restarts == 3


class TestErrors:
    def test_invalid_value_reports_its_line(self):
        text = run_file("[run]", "label = x", "", "[search]", "restarts = -1")

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 5
        assert "search.restarts" in str(exc_info.value)
        assert str(exc_info.value).startswith("line 5:")

    def test_threshold_at_one_half_is_rejected(self):
        text = run_file("[averaging]", "replicates = 10", "strength_threshold = 0.5")

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3

    def test_unknown_section(self):
        text = run_file("[run]", "label = x", "[serch]", "restarts = 2")

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3
        assert "serch" in str(exc_info.value)

    def test_unknown_node_kind(self):
        text = run_file("[schema]", "a = discrete", "b = ordinal")

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3

    def test_recode_of_undeclared_column(self):
        text = run_file("[schema]", "a = discrete", "[recode.b]", "x = y")

        with pytest.raises(ConfigError, match="recode"):
            parse_run_config(text)

    def test_duplicate_key_is_a_syntax_error(self):
        text = run_file("[cv]", "folds = 5", "folds = 6")

        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(text)

        assert exc_info.value.line == 3

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "missing.ini")

    def test_exit_code_is_usage(self):
        assert ConfigError("bad").exit_code == 1


class TestOverrides:
    def test_overrides_apply_and_none_is_skipped(self):
        cfg = parse_run_config(FULL).with_overrides(
            {"search.seed": 99, "averaging.seed": 99, "run.label": None, "cv.standardize": True}
        )

        assert cfg.search.seed == 99
        assert cfg.averaging.seed == 99
        assert cfg.run.label == "survey"
        assert cfg.cv.standardize is True
        assert cfg.schema_["region"] == NodeKind.DISCRETE

    def test_invalid_override(self):
        with pytest.raises(ConfigError, match="cv.folds"):
            RunConfig().with_overrides({"cv.folds": 1})

    def test_original_is_untouched(self):
        cfg = parse_run_config(FULL)
        cfg.with_overrides({"search.restarts": 0})

        assert cfg.search.restarts == 5


class TestDigest:
    def test_digest_is_stable_across_parses(self):
        assert parse_run_config(FULL).digest() == parse_run_config(FULL).digest()

    def test_digest_tracks_every_setting(self):
        base = parse_run_config(FULL)

        assert base.with_overrides({"search.seed": 12}).digest() != base.digest()
        assert base.with_overrides({"run.workers": 1}).digest() != base.digest()

    def test_key_order_does_not_matter(self):
        a = parse_run_config(run_file("[search]", "seed = 1", "restarts = 4"))
        b = parse_run_config(run_file("[search]", "restarts = 4", "seed = 1"))

        assert a.digest() == b.digest()

    def test_write_resolved(self, tmp_path):
        cfg = parse_run_config(FULL, base=tmp_path)

        target = write_resolved(cfg, tmp_path)
        body = json.loads(target.read_text())

        assert target.name == "resolved_config.json"
        assert body["digest"] == cfg.digest()
        assert body["config"]["search"]["seed"] == 11
        assert body["config"]["schema"] == {"region": "discrete", "forest": "continuous", "crops": "continuous"}
        assert list(body["config"]["schema"]) == ["region", "forest", "crops"]
        assert RunConfig.model_validate(body["config"]).digest() == cfg.digest()

    def test_schema_order_is_part_of_the_digest(self):
        a = parse_run_config(run_file("[schema]", "x = continuous", "y = continuous"))
        b = parse_run_config(run_file("[schema]", "y = continuous", "x = continuous"))

        assert a.digest() != b.digest()


class TestResolvedConfig:
    def test_resolved_file_loads_back(self, tmp_path):
        cfg = parse_run_config(FULL, base=tmp_path)
        target = write_resolved(cfg, tmp_path)

        loaded = load_run_config(target)

        assert loaded == cfg
        assert loaded.digest() == cfg.digest()
        assert list(loaded.schema_) == ["region", "forest", "crops"]

    def test_embedded_run_block(self, tmp_path):
        cfg = parse_run_config(FULL, base=tmp_path)
        artifact = {"run": cfg.resolved(), "edges": []}

        assert parse_resolved_config(json.dumps(artifact)) == cfg

    def test_digest_mismatch(self, tmp_path):
        body = parse_run_config(FULL, base=tmp_path).resolved()
        body["config"]["search"]["seed"] = 12

        with pytest.raises(ConfigError, match="digest"):
            parse_resolved_config(json.dumps(body))

    def test_missing_config_block(self):
        with pytest.raises(ConfigError, match="config"):
            parse_resolved_config('{"digest": "abc"}')

    def test_invalid_json_reports_line(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_resolved_config('{\n  "config": {\n  oops\n}')

        assert exc_info.value.line == 3

    def test_invalid_values(self):
        with pytest.raises(ConfigError, match="cv.folds"):
            parse_resolved_config(json.dumps({"config": {"cv": {"folds": 1}}}))
