"""
Corpus cleaning: bot removal and per-user activity distribution.

Two rules flag a user as a bot:
    volume  : tweet_count > cap
    interval: tweet_count > floor and the top-3 posting-interval buckets
              cover >= coverage of all the user's intervals
A flagged user is attributed to the first rule that matches.
"""

from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from typing import Dict, Iterable, List, Set, Tuple

import numpy as np
import pandas as pd

from core.models import TweetRecord, UserActivity


RULE_VOLUME = "volume"
RULE_INTERVAL = "interval"


@dataclass
class BotDetection:
    bots: Set[str] = field(default_factory=set)
    rule_counts: Dict[str, int] = field(default_factory=lambda: {RULE_VOLUME: 0, RULE_INTERVAL: 0})
    report: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(
        columns=["user_id", "tweet_count", "rule", "top3_coverage"]))

    def rule_of(self, user_id: str) -> str:
        row = self.report[self.report["user_id"] == user_id]
        return row["rule"].iloc[0] if len(row) else ""


def top_interval_coverage(activity: UserActivity, top: int = 3) -> float:
    """
    Share of intervals falling in the `top` most frequent buckets.

    Ties between buckets go to the smaller interval.
    """
    total = sum(activity.interval_histogram.values())
    if total == 0:
        return 0.0
    ranked = sorted(activity.interval_histogram.items(), key=lambda kv: (-kv[1], kv[0]))
    return sum(count for _, count in ranked[:top]) / total


def detect_bots(activities: Iterable[UserActivity], cap: int = 5000, floor: int = 1000,
                coverage: float = 0.90, top: int = 3) -> BotDetection:
    """Flag bot accounts; result is independent of input order."""
    rows = []
    for activity in sorted(activities, key=lambda a: a.user_id):
        share = top_interval_coverage(activity, top)
        if activity.tweet_count > cap:
            rule = RULE_VOLUME
        elif activity.tweet_count > floor and share >= coverage:
            rule = RULE_INTERVAL
        else:
            continue
        rows.append((activity.user_id, activity.tweet_count, rule, share))

    report = pd.DataFrame(rows, columns=["user_id", "tweet_count", "rule", "top3_coverage"])
    rule_counts = {RULE_VOLUME: 0, RULE_INTERVAL: 0}
    rule_counts.update(Counter(report["rule"]))
    return BotDetection(bots=set(report["user_id"]), rule_counts=rule_counts, report=report)


def remove_bot_tweets(records: Iterable[TweetRecord], detection: BotDetection) -> Tuple[List[TweetRecord], Dict[str, int]]:
    """
    Drop every record owned by a flagged user.

    Returns:
        (kept records, removed record count per rule)
    """
    rule_by_user = dict(zip(detection.report["user_id"], detection.report["rule"]))
    removed = {RULE_VOLUME: 0, RULE_INTERVAL: 0}
    kept = []
    for record in records:
        rule = rule_by_user.get(record.user_id)
        if rule is None:
            kept.append(record)
        else:
            removed[rule] += 1
    return kept, removed


def user_activity_table(records: Iterable[TweetRecord]) -> pd.DataFrame:
    """
    Distribution of tweets per user: tweet_count -> user_fraction (sums to 1).
    Sorted by tweet_count, ready for a log-log scatter.
    """
    per_user = Counter(r.user_id for r in records)
    if not per_user:
        return pd.DataFrame(columns=["tweet_count", "n_users", "user_fraction"])
    distribution = Counter(per_user.values())
    n_users = len(per_user)
    rows = [(count, n, n / n_users) for count, n in sorted(distribution.items())]
    return pd.DataFrame(rows, columns=["tweet_count", "n_users", "user_fraction"])


def activity_summary(records: List[TweetRecord], window: Tuple[date, date], light_max: int = 10) -> Dict[str, float]:
    """
    Headline figures of the activity distribution:
    - share of users with at most `light_max` tweets
    - share of users averaging more than one tweet per day over the window
      and the share of tweets those users produced
    """
    per_user = Counter(r.user_id for r in records)
    n_users = len(per_user)
    n_tweets = sum(per_user.values())
    if n_users == 0:
        return {"users": 0, "tweets": 0, "light_user_share": 0.0,
                "daily_user_share": 0.0, "daily_user_tweet_share": 0.0}

    days = (window[1] - window[0]).days + 1
    counts = np.fromiter(per_user.values(), dtype=np.int64)
    daily = counts > days
    return {
        "users": n_users,
        "tweets": n_tweets,
        "light_user_share": float((counts <= light_max).mean()),
        "daily_user_share": float(daily.mean()),
        "daily_user_tweet_share": float(counts[daily].sum() / n_tweets),
    }
