"""
End-to-end runs of run_analysis.py on the synthetic corpus.
"""

import json
import math
from datetime import date, timedelta

import pandas as pd
import pytest
import yaml

from core.config import load_config
from core.run_context import Console, RunContext
from core.states import load_clock_rules
from data.resources import load_event_calendar
from data.tweet_loader import read_records
from run_analysis import main
from scripts.make_synthetic_corpus import generate


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic")
    generate(out, n_tweets=5000, seed=3)
    return out


def run_all(corpus_dir, name, *extra):
    out = corpus_dir / name
    status = main(["all", "--config", str(corpus_dir / "config.yaml"), "--out", str(out), "--quiet", *extra])
    return status, out


@pytest.fixture(scope="module")
def full_run(corpus_dir):
    status, out = run_all(corpus_dir, "run_a")
    assert status == 0
    return out


def test_full_run_is_deterministic(corpus_dir, full_run):
    out_a = full_run
    status_b, out_b = run_all(corpus_dir, "run_b", "--workers", "2")
    assert status_b == 0

    manifest = json.loads((out_a / "manifest.json").read_text(encoding="utf-8"))
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()

    files = {a["file"] for a in manifest["artifacts"]}
    for name in files:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
    for expected in ("bot_report.csv", "state_share.csv", "topic_report.csv", "topic_count_curve.csv",
                     "county_density.csv", "ingest_counters.json", "records.ndjson"):
        assert expected in files
    assert [i["file"] for i in manifest["inputs"]] == ["tweets.jsonl", "compensation.jsonl"]
    assert manifest["reconciliation"]["reconciles"]
    assert manifest["seeds"] == {"base": 3}


def test_bot_is_removed_and_counters_add_up(full_run):
    out = full_run
    bots = pd.read_csv(out / "bot_report.csv", dtype={"user_id": str})
    assert "bot0001" in set(bots["user_id"])

    counters = json.loads((out / "ingest_counters.json").read_text(encoding="utf-8"))
    assert counters["reconciles"]
    assert counters["retweets"] >= 20
    assert counters["skipped"] >= 1

    curve = pd.read_csv(out / "topic_count_curve.csv")
    assert list(curve["K"]) == [2, 3, 4]
    assert (curve["repeats"] == 2).all()


def brute_force_counts(records, rules, start, end):
    """counts[weekday][hour] of records whose local date falls in [start, end]."""
    counts = [[0] * 24 for _ in range(8)]
    for record in records:
        rule = rules[record.state]
        standard = record.created_at_utc + timedelta(hours=rule.std_offset)
        dst = rule.observes_dst and rule.dst_start <= standard.date() < rule.dst_end
        local = standard + timedelta(hours=1) if dst else standard
        if start <= local.date() <= end:
            counts[local.isoweekday()][local.hour] += 1
    return counts


def brute_force_hourly(counts, hour):
    weekend_total = sum(sum(counts[d]) for d in (6, 7))
    workday_total = sum(sum(counts[d]) for d in range(1, 6))
    workday = sum(counts[d][hour] for d in range(1, 6))
    if not weekend_total or not workday_total or not workday:
        return None
    weekend = sum(counts[d][hour] for d in (6, 7))
    return (weekend / weekend_total) / (workday / workday_total) - 1


def brute_force_daily(counts, day):
    weekend_total = sum(sum(counts[d]) for d in (6, 7))
    day_business = sum(counts[day][8:17])
    if not weekend_total or not sum(counts[day]) or not day_business:
        return None
    weekend_business = sum(sum(counts[d][8:17]) for d in (6, 7))
    return (weekend_business / weekend_total) / (day_business / sum(counts[day])) - 1


def assert_cell(emitted, expected):
    if expected is None:
        assert math.isnan(emitted)
    else:
        assert emitted == pytest.approx(expected, abs=1e-6)


def test_single_step_run(corpus_dir):
    out = corpus_dir / "run_engagement"
    status = main(["engagement", "--config", str(corpus_dir / "config.yaml"), "--out", str(out),
                   "--states", "NY,CA", "--quiet"])
    assert status == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["steps"] == ["engagement"]
    assert all(a["step"] == "engagement" for a in manifest["artifacts"])

    config = load_config(str(corpus_dir / "config.yaml"), {"execution": {"states": ["NY", "CA"]}})
    context = RunContext(config, Console(quiet=True))
    rules = load_clock_rules(config.resolve(config.temporal.clock_rules))
    calendar = load_event_calendar(config.resolve(config.engagement.calendar))

    hourly = pd.read_csv(out / "engagement_lockdown_hourly.csv")
    daily = pd.read_csv(out / "engagement_lockdown_daily.csv")
    assert len(hourly) > 0 and set(hourly["state"]) <= {"NY", "CA"}
    for (_, h_row), (_, d_row) in zip(hourly.iterrows(), daily.iterrows()):
        start = date.fromisoformat(h_row["date"])
        assert start == calendar.lockdown[h_row["state"]] + timedelta(days=7 * int(h_row["offset"]))
        assert (d_row["state"], d_row["date"]) == (h_row["state"], h_row["date"])
        state_records = [r for r in context.records if r.state == h_row["state"]]
        counts = brute_force_counts(state_records, rules, start, start + timedelta(days=6))
        assert h_row["n_tweets"] == sum(sum(counts[d][8:17]) for d in range(1, 8))
        for hour in range(8, 17):
            assert_cell(h_row[str(hour)], brute_force_hourly(counts, hour))
        for day, label in enumerate(["Mon", "Tue", "Wed", "Thu", "Fri"], start=1):
            assert_cell(d_row[label], brute_force_daily(counts, day))


def test_record_file_round_trips(corpus_dir, full_run):
    records = read_records(full_run / "records.ndjson")
    context = RunContext(load_config(str(corpus_dir / "config.yaml")), Console(quiet=True))
    assert records == sorted(context.ingest.records, key=lambda r: r.tweet_id)

    manifest = json.loads((full_run / "manifest.json").read_text(encoding="utf-8"))
    entry = next(a for a in manifest["artifacts"] if a["file"] == "records.ndjson")
    assert (entry["step"], entry["rows"]) == ("ingest", len(records))
    assert entry["rows"] == manifest["ingest_counters"]["output"]


def test_empty_corpus_fails_cleanly(corpus_dir, capsys):
    (corpus_dir / "empty.jsonl").write_text("not json\n", encoding="utf-8")
    config = yaml.safe_load((corpus_dir / "config.yaml").read_text(encoding="utf-8"))
    config["ingest"]["primary_inputs"] = ["empty.jsonl"]
    config["ingest"]["compensation_inputs"] = []
    config_path = corpus_dir / "empty_config.yaml"
    config_path.write_text(yaml.safe_dump(config), encoding="utf-8")

    out = corpus_dir / "run_empty"
    assert main(["all", "--config", str(config_path), "--out", str(out), "--quiet"]) == 1
    assert "empty corpus" in capsys.readouterr().err
    assert not any(out.iterdir())


def test_missing_inputs_fail(corpus_dir, capsys):
    assert main(["ingest", "--config", str(corpus_dir / "nope.yaml")]) == 1
    assert main(["ingest", "--config", str(corpus_dir / "config.yaml"),
                 "--input", str(corpus_dir / "missing.jsonl"), "--out", str(corpus_dir / "run_missing")]) == 1
    assert "not found" in capsys.readouterr().err
