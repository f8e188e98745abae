"""
Tests bot removal rules and the user activity distribution.
"""

from datetime import date, datetime, timedelta

import pytz

from core.models import GeoTag, TweetRecord, UserActivity
from data.corpus_cleaner import (
    RULE_INTERVAL, RULE_VOLUME, activity_summary, detect_bots, remove_bot_tweets,
    top_interval_coverage, user_activity_table,
)


START = datetime(2020, 2, 1, tzinfo=pytz.utc)


def activity_from_gaps(user_id, gaps):
    """Activity whose consecutive gaps (seconds) are exactly `gaps`."""
    stamps = [START]
    for gap in gaps:
        stamps.append(stamps[-1] + timedelta(seconds=gap))
    return UserActivity.from_timestamps(user_id, stamps)


def irregular(user_id, n_tweets):
    return activity_from_gaps(user_id, [100 + k for k in range(n_tweets - 1)])


def regular_share(user_id, n_tweets, share):
    """n_tweets - 1 gaps; `share` of them equal to 60 s, the rest all distinct."""
    n_gaps = n_tweets - 1
    same = int(round(share * n_gaps))
    return activity_from_gaps(user_id, [60] * same + [1000 + k for k in range(n_gaps - same)])


def test_histogram_invariant():
    activity = regular_share("u", 101, 0.5)
    assert activity.check()
    assert sum(activity.interval_histogram.values()) == 100


def test_volume_rule_boundary():
    detection = detect_bots([irregular("at_cap", 5000), irregular("over_cap", 5001)])
    assert detection.bots == {"over_cap"}
    assert detection.rule_of("over_cap") == RULE_VOLUME
    assert detection.rule_counts == {RULE_VOLUME: 1, RULE_INTERVAL: 0}


def test_interval_rule_coverage():
    bot = regular_share("bot", 1001, 0.95)
    human = regular_share("human", 1001, 0.89)
    assert top_interval_coverage(bot) == 952 / 1000
    assert top_interval_coverage(human) == 892 / 1000

    detection = detect_bots([bot, human])
    assert detection.bots == {"bot"}
    assert detection.rule_of("bot") == RULE_INTERVAL


def test_interval_rule_needs_more_than_floor():
    detection = detect_bots([regular_share("exactly_floor", 1000, 1.0)])
    assert detection.bots == set()


def test_detection_independent_of_order():
    users = [irregular("a", 5001), regular_share("b", 1500, 0.99), irregular("c", 20)]
    forward = detect_bots(users)
    backward = detect_bots(list(reversed(users)))
    assert forward.bots == backward.bots == {"a", "b"}
    assert forward.report.equals(backward.report)


def record(tweet_id, user_id):
    return TweetRecord(tweet_id=str(tweet_id), user_id=user_id, created_at_utc=START, text="corona",
                       geo=GeoTag(country_code="US", state="NY"))


def test_remove_bot_tweets_counts_per_rule():
    detection = detect_bots([irregular("loud", 5001), regular_share("clock", 1200, 1.0), irregular("human", 3)])
    records = [record(1, "loud"), record(2, "clock"), record(3, "clock"), record(4, "human")]
    kept, removed = remove_bot_tweets(records, detection)
    assert [r.tweet_id for r in kept] == ["4"]
    assert removed == {RULE_VOLUME: 1, RULE_INTERVAL: 2}
    assert len(kept) + sum(removed.values()) == len(records)


def test_user_activity_distribution():
    records = [record(i, "a") for i in range(3)] + [record(10, "b"), record(11, "c")]
    table = user_activity_table(records)
    assert list(table["tweet_count"]) == [1, 3]
    assert list(table["n_users"]) == [2, 1]
    assert abs(table["user_fraction"].sum() - 1.0) < 1e-12


def test_activity_summary():
    records = [record(i, "heavy") for i in range(12)] + [record(100, "light")]
    summary = activity_summary(records, (date(2020, 2, 1), date(2020, 2, 10)), light_max=10)
    assert summary["users"] == 2
    assert summary["light_user_share"] == 0.5
    assert summary["daily_user_share"] == 0.5
    assert summary["daily_user_tweet_share"] == 12 / 13
