"""
Tests config loading / validation / hashing, resource tables and the artifact writer.
"""

import json
import math
from datetime import date
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from core.config import GEOCODER_CONTACT_ENV, load_config
from core.models import StepResult
from data.resources import load_cases, load_event_calendar, load_population, state_statistics
from reports.exporters import ArtifactWriter, to_jsonable


ROOT = Path(__file__).parent
REPO_CONFIG = ROOT / "config_geotweets.yaml"


# ============================================================================
# CONFIG
# ============================================================================

def test_repo_config_loads_and_validates(tmp_path):
    tweets = tmp_path / "tweets.jsonl"
    tweets.write_text("", encoding="utf-8")
    config = load_config(str(REPO_CONFIG), {"ingest": {"primary_inputs": [str(tweets)]}})
    assert config.ingest.window_start == date(2020, 1, 25)
    assert config.resolve("resources/stopwords.txt") == ROOT / "resources" / "stopwords.txt"
    assert config.validate()

    config.content.k_candidates = [1, 2]
    with pytest.raises(ValueError, match="k_candidates"):
        config.validate()

    config.content.k_candidates = [2, 3]
    config.execution.states = ["NY", "ZZ"]
    with pytest.raises(ValueError, match="execution.states"):
        config.validate()


def test_validate_reports_missing_files(tmp_path):
    with pytest.raises(ValueError, match="no input files"):
        load_config(str(REPO_CONFIG)).validate()
    config = load_config(str(REPO_CONFIG), {"ingest": {"primary_inputs": [str(tmp_path / "missing.jsonl")]}})
    with pytest.raises(FileNotFoundError):
        config.validate()


def test_validate_parses_resources(tmp_path):
    tweets = tmp_path / "tweets.jsonl"
    tweets.write_text("", encoding="utf-8")
    config = load_config(str(REPO_CONFIG), {"ingest": {"primary_inputs": [str(tweets)]}})

    lexicon = tmp_path / "lexicon.csv"
    lexicon.write_text("word,polarity,subjectivity\ngood,7.5,abc\n", encoding="utf-8")
    config.sentiment.lexicon = str(lexicon)
    with pytest.raises(ValueError, match="sentiment.lexicon"):
        config.validate()

    config.sentiment.lexicon = str(ROOT / "resources" / "sentiment_lexicon.csv")
    cases = tmp_path / "cases.csv"
    cases.write_text("state,date,cum_cases,cum_deaths\nNY,2020-03-01,5,0\nNY,2020-03-02,-1,0\n", encoding="utf-8")
    config.geo.cases = str(cases)
    with pytest.raises(ValueError, match="geo.cases"):
        config.validate()


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("content:\n  topics: 5\n", encoding="utf-8")
    with pytest.raises(ValueError, match="Unknown key"):
        load_config(str(path))
    path.write_text("plots:\n  dpi: 300\n", encoding="utf-8")
    with pytest.raises(ValueError, match="Unknown config section"):
        load_config(str(path))
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "absent.yaml"))


def test_overrides_and_dates(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("ingest:\n  window_start: '2020-02-01'\nexecution:\n  seed: 5\n", encoding="utf-8")
    config = load_config(str(path), {"execution": {"seed": 9, "workers": None}})
    assert config.ingest.window_start == date(2020, 2, 1)
    assert config.execution.seed == 9
    assert config.execution.workers == 1
    assert config.base_dir == str(tmp_path)


def test_config_hash_ignores_output_settings():
    base = load_config(str(REPO_CONFIG))
    moved = load_config(str(REPO_CONFIG), {"execution": {"out_dir": "/tmp/elsewhere", "workers": 8, "quiet": True}})
    reseeded = load_config(str(REPO_CONFIG), {"execution": {"seed": 1}})
    assert base.config_hash() == moved.config_hash()
    assert base.config_hash() != reseeded.config_hash()


def test_geocoder_contact_from_environment(monkeypatch):
    monkeypatch.setenv(GEOCODER_CONTACT_ENV, "research@example.org")
    config = load_config(str(REPO_CONFIG))
    assert config.geo.geocoder_contact == "research@example.org"
    assert "geocoder_contact" not in config.to_dict()["geo"]


# ============================================================================
# RESOURCE TABLES
# ============================================================================

def test_shipped_resource_tables():
    calendar = load_event_calendar(ROOT / "resources" / "event_calendar.csv")
    assert calendar.lockdown["NY"] == date(2020, 3, 22)
    assert calendar.reopen["GA"] == date(2020, 4, 24)
    population = load_population(ROOT / "resources" / "state_population.csv")
    assert len(population) == 51
    cases = load_cases(ROOT / "resources" / "state_cases.csv")
    assert set(cases["state"]) <= set(population)


def test_daily_case_layout_accepted(tmp_path):
    path = tmp_path / "us-states.csv"
    path.write_text(
        "date,state,fips,cases,deaths\n"
        "2020-03-01,New York,36,1,0\n"
        "2020-03-02,New York,36,1,0\n"
        "2020-03-01,Guam,66,3,0\n"
        "2020-03-02,District of Columbia,11,2,0\n",
        encoding="utf-8",
    )
    cases = load_cases(path)
    assert list(cases["state"]) == ["DC", "NY", "NY"]
    assert list(cases.columns) == ["state", "date", "cum_cases", "cum_deaths"]


def test_state_statistics_snapshot():
    cases = pd.DataFrame([("NY", date(2020, 3, 1), 5, 0), ("NY", date(2020, 3, 5), 50, 2)],
                         columns=["state", "date", "cum_cases", "cum_deaths"])
    stats = state_statistics({"NY": 1000, "CA": 2000, "WY": 0}, cases, snapshot=date(2020, 3, 3))
    assert (stats["NY"].cum_cases, stats["NY"].cum_deaths) == (5, 0)
    assert stats["CA"].cum_cases == 0
    assert "WY" not in stats


def test_bad_resource_rows(tmp_path):
    path = tmp_path / "population.csv"
    path.write_text("state,population\nNY,100\nZZ,5\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown state"):
        load_population(path)
    path.write_text("state,lockdown,reopen\nNY,2020-03-22,2020-03-01\n", encoding="utf-8")
    with pytest.raises(ValueError, match="not after lockdown"):
        load_event_calendar(path)


# ============================================================================
# ARTIFACTS
# ============================================================================

def test_to_jsonable():
    value = {"n": np.int64(3), "x": float("nan"), "inf": np.inf, "day": date(2020, 3, 1),
             "flags": np.array([True, False]), "tags": {"b", "a"}}
    assert to_jsonable(value) == {"n": 3, "x": None, "inf": None, "day": "2020-03-01",
                                  "flags": [True, False], "tags": ["a", "b"]}


def test_writer_outputs_are_stable_and_removable(tmp_path):
    result = StepResult()
    result.add_table("shares", pd.DataFrame({"state": ["NY", "CA"], "percent": [2 / 3, math.nan]}))
    result.add_document("summary", {"b": 1, "a": date(2020, 1, 25)})

    writer = ArtifactWriter(tmp_path / "out")
    paths = writer.write_result("geo", result)
    assert [p.name for p in paths] == ["shares.csv", "summary.json"]
    assert (tmp_path / "out" / "shares.csv").read_text(encoding="utf-8") == "state,percent\nNY,0.666667\nCA,\n"
    assert json.loads(paths[1].read_text(encoding="utf-8")) == {"a": "2020-01-25", "b": 1}

    manifest = writer.write_manifest("abc", {"base": 1}, [paths[0]], {"output": 2}, {"reconciles": True}, ["geo"])
    document = json.loads(manifest.read_text(encoding="utf-8"))
    assert [a["rows"] for a in document["artifacts"]] == [2, None]
    assert document["inputs"][0]["file"] == "shares.csv"

    assert writer.cleanup() == 3
    assert not any((tmp_path / "out").iterdir())
