"""
Tests ingest: parsing, keyword window, geo acceptance, dedup and counter reconciliation.
"""

import json
from datetime import date, datetime

import pytz
import pytest

from core.models import SOURCE_COMPENSATION, SOURCE_PRIMARY, TweetRecord
from core.states import is_state, normalize_state, state_from_place
from data.tweet_loader import (
    KeywordFilter, accept_us_geotag, keyword_match, load_corpus, merge_corpora, parse_timestamp,
    parse_tweet_json, read_records, write_records,
)


WINDOW = (date(2020, 1, 25), date(2020, 5, 10))
FILTER = KeywordFilter.from_lists(["coronavirus", "corona"], ["covid19"], date(2020, 2, 11))


def tweet(tweet_id, text="coronavirus update", user="u1", created="Wed Mar 18 15:00:00 +0000 2020",
          country="US", place="Denver, CO", **extra):
    obj = {"id_str": str(tweet_id), "user": {"id_str": user}, "created_at": created, "text": text}
    if country is not None:
        obj["place"] = {"country_code": country, "full_name": place}
    obj.update(extra)
    return json.dumps(obj)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def test_parse_timestamp_formats():
    expected = datetime(2020, 2, 5, 18, 0, 0, tzinfo=pytz.utc)
    assert parse_timestamp("Wed Feb 05 18:00:00 +0000 2020") == expected
    assert parse_timestamp("2020-02-05T18:00:00.750Z") == expected
    assert parse_timestamp("2020-02-05 13:00:00-05:00") == expected
    assert parse_timestamp("not a date") is None
    assert parse_timestamp("") is None


def test_parse_tweet_json_reasons():
    assert parse_tweet_json("{not json")[1] == "malformed"
    assert parse_tweet_json("[1, 2]")[1] == "malformed"
    assert parse_tweet_json(json.dumps({"id_str": "1", "text": "x"}))[1] == "missing_fields"
    assert parse_tweet_json(tweet(1, created="not-a-time"))[1] == "bad_timestamp"

    record, reason = parse_tweet_json(tweet(1, coordinates={"type": "Point", "coordinates": [-104.99, 39.74]}))
    assert reason is None
    assert record.state == "CO"
    assert record.geo.point == (39.74, -104.99)
    assert record.geo.precision == "exact_gps"


def test_extended_text_and_retweet_flag():
    record, _ = parse_tweet_json(tweet(2, text="short", extended_tweet={"full_text": "the long coronavirus text"}))
    assert record.text == "the long coronavirus text"
    record, _ = parse_tweet_json(tweet(3, text="RT @who: coronavirus"))
    assert record.is_retweet
    record, _ = parse_tweet_json(tweet(4, retweeted_status={"id_str": "1"}))
    assert record.is_retweet


@pytest.mark.parametrize("place,expected", [
    ("Manhattan, NY", ("NY", "ok")),
    ("Texas, USA", ("TX", "ok")),
    ("Washington, DC", ("DC", "ok")),
    ("Puerto Rico, USA", (None, "no_state")),
    ("Kansas City, MO", ("MO", "ok")),
    (None, (None, "no_state")),
])
def test_state_from_place(place, expected):
    assert state_from_place(place) == expected


def test_state_from_place_ambiguous():
    assert state_from_place("Georgia, Virginia") == (None, "ambiguous")


def test_state_code_helpers():
    assert is_state("ny") and is_state("DC")
    assert not is_state("PR") and not is_state(None)
    assert normalize_state(" ca ") == "CA"
    with pytest.raises(ValueError, match="unknown state"):
        normalize_state("GU")


def test_added_keywords_only_after_effective_date():
    assert not keyword_match("new covid19 numbers", FILTER, date(2020, 2, 10))
    assert keyword_match("new COVID19 numbers", FILTER, date(2020, 2, 11))
    assert keyword_match("Coronavirus again", FILTER, date(2020, 1, 30))
    assert not keyword_match("", FILTER, date(2020, 3, 1))


def test_geo_acceptance():
    record, _ = parse_tweet_json(tweet(1))
    assert accept_us_geotag(record)
    record, _ = parse_tweet_json(tweet(2, country="GB", place="London, England"))
    assert not accept_us_geotag(record)
    record, _ = parse_tweet_json(tweet(3, place="Somewhere, USA"))
    assert not accept_us_geotag(record)
    # GPS point resolves the state when the place does not
    record, _ = parse_tweet_json(tweet(4, place="Somewhere, USA",
                                       coordinates={"type": "Point", "coordinates": [-104.99, 39.74]}))
    assert accept_us_geotag(record, point_resolver=lambda point: "CO")


def test_load_corpus_counters_reconcile(tmp_path):
    primary = write_lines(tmp_path / "primary.jsonl", [
        tweet(1),
        tweet(2, user="u2", place="Austin, TX"),
        tweet(3, text="RT @x: coronavirus"),
        tweet(4, country="CA", place="Toronto, Ontario"),
        tweet(5, text="nothing relevant here"),
        tweet(6, text="covid19 early", created="Mon Feb 03 12:00:00 +0000 2020"),
        tweet(7, created="Mon May 11 12:00:00 +0000 2020"),
        "{broken",
        "",
        tweet(8, user="u3", place="Gotham, USA"),
    ])
    compensation = write_lines(tmp_path / "comp.jsonl", [
        tweet(1, text="coronavirus duplicate from the second collector"),
        tweet(9, user="u4", place="Miami, FL"),
    ])

    result = load_corpus([primary], [compensation], FILTER, WINDOW)
    c = result.counters

    assert c["lines"] == 11  # blank line not counted
    assert c["skips"] == {"malformed": 1, "missing_fields": 0, "bad_timestamp": 0, "out_of_window": 1}
    assert c["retweets"] == 1
    assert c["keyword_rejected"] == 2
    assert c["duplicates"] == 1
    assert c["geo_rejections"] == {"non_us": 1, "no_state": 1, "ambiguous": 0}
    assert c["output"] == 3
    assert c["reconciles"]
    assert c["compensation_records"] == 1

    by_id = {r.tweet_id: r for r in result.records}
    assert set(by_id) == {"1", "2", "9"}
    assert by_id["1"].source_corpus == SOURCE_PRIMARY
    assert by_id["1"].text == "coronavirus update"
    assert by_id["9"].source_corpus == SOURCE_COMPENSATION


def test_activities_counted_before_geo_filter(tmp_path):
    primary = write_lines(tmp_path / "p.jsonl", [
        tweet(1, user="abroad", country="GB", place="London, England"),
        tweet(2, user="abroad", country="GB", place="London, England", created="Wed Mar 18 16:00:00 +0000 2020"),
        tweet(3, user="home"),
    ])
    result = load_corpus([primary], [], FILTER, WINDOW)
    assert result.activities["abroad"].tweet_count == 2
    assert result.activities["abroad"].interval_histogram == {3600: 1}
    assert [r.user_id for r in result.records] == ["home"]


def test_primary_files_win_over_compensation_order(tmp_path):
    a = write_lines(tmp_path / "a.jsonl", [tweet(i, user=f"u{i % 3}") for i in range(1, 30)])
    b = write_lines(tmp_path / "b.jsonl", [tweet(i, user=f"u{i % 4}", text="corona copy") for i in range(20, 50)])
    result = load_corpus([a], [b], FILTER, WINDOW)
    assert result.counters["duplicates"] == 10
    assert result.counters["output"] == 49
    assert all(r.text == "coronavirus update" for r in result.records if int(r.tweet_id) < 30)


def test_merge_corpora_primary_wins():
    def record(tweet_id, day, source):
        return TweetRecord(tweet_id=tweet_id, user_id="u1", created_at_utc=datetime(2020, 3, day, 12, tzinfo=pytz.utc),
                           text=source, source_corpus=source)

    primary = [record("1", 1, SOURCE_PRIMARY), record("2", 1, SOURCE_PRIMARY)]
    compensation = [record("2", 2, SOURCE_COMPENSATION), record("3", 2, SOURCE_COMPENSATION)]
    merged, duplicates, daily = merge_corpora(primary, compensation)
    assert [r.tweet_id for r in merged] == ["1", "2", "3"]
    assert merged[1].source_corpus == SOURCE_PRIMARY
    assert duplicates == 1
    assert daily.values.tolist() == [["2020-03-01", SOURCE_PRIMARY, 2], ["2020-03-02", SOURCE_COMPENSATION, 1]]


def test_missing_input_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus([str(tmp_path / "nope.jsonl")], [], FILTER, WINDOW)


def test_record_file_is_sorted_and_readable(tmp_path):
    primary = write_lines(tmp_path / "p.jsonl", [tweet(30), tweet(4), tweet(100)])
    records = load_corpus([primary], [], FILTER, WINDOW).records
    path = tmp_path / "records.jsonl"
    assert write_records(records, path) == 3
    assert [r.tweet_id for r in read_records(path)] == ["100", "30", "4"]
    assert read_records(path)[0] == sorted(records, key=lambda r: r.tweet_id)[0]
