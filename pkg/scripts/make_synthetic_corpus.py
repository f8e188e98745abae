#!/usr/bin/env python3
"""
Synthetic geo-tagged corpus for demos and end-to-end tests.

Writes into one directory:
    tweets.jsonl             primary stream (Twitter JSON lines)
    compensation.jsonl       second collector: overlaps the primary + a few extra tweets
    counties.geojson         four rectangular counties (two in NY, two in CA)
    county_population.csv
    event_calendar.csv, state_population.csv, state_cases.csv
    config.yaml              ready-to-run configuration (small LDA settings)

Contents are fully determined by (n_tweets, seed): human users in NY and CA
with daytime-heavy local hours and a ramp in March, three topic vocabularies,
hashtags / mentions / facial emojis, one fixed-interval bot, plus retweets,
non-US tweets, keyword misses and one malformed line.

Usage:
    python scripts/make_synthetic_corpus.py --out demo/ --tweets 5000
    python run_analysis.py all --config demo/config.yaml
"""

import argparse
import json
import sys
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pytz
import yaml
from shapely.geometry import box, mapping

REPO_ROOT = Path(__file__).resolve().parent.parent
RESOURCES = REPO_ROOT / "resources"

WINDOW_START = date(2020, 1, 25)
WINDOW_END = date(2020, 5, 10)
TWITTER_FORMAT = "%a %b %d %H:%M:%S +0000 %Y"

STATES = {
    "NY": {"tz": "America/New_York", "places": ["New York, NY", "Albany, NY", "Brooklyn, NY"]},
    "CA": {"tz": "America/Los_Angeles", "places": ["Los Angeles, CA", "San Francisco, CA", "Santa Monica, CA"]},
}

# (state, county, min lon, min lat, max lon, max lat)
COUNTIES = [
    ("NY", "Albany", -74.26, 42.42, -73.68, 42.82),
    ("NY", "Kings", -74.04, 40.57, -73.83, 40.74),
    ("CA", "Los Angeles", -118.67, 33.70, -117.65, 34.82),
    ("CA", "San Francisco", -122.51, 37.71, -122.36, 37.83),
]
COUNTY_POPULATION = {"Albany": 305506, "Kings": 2559903, "Los Angeles": 10039107, "San Francisco": 881549}

TOPICS = {
    "health": ["hospital", "nurses", "doctors", "masks", "testing", "ventilators", "patients", "symptoms", "vaccine"],
    "economy": ["jobs", "stocks", "market", "unemployment", "business", "rent", "stimulus", "layoffs", "economy"],
    "home": ["quarantine", "netflix", "cooking", "kids", "school", "baking", "zoom", "homeschool", "family"],
}
MOODS = {
    "good": ["great news", "so grateful", "stay safe", "thank you", "good vibes"],
    "bad": ["this is terrible", "so scared", "really worried", "awful day", "feeling sick"],
    "flat": ["update", "today", "latest", "reading about", "new post"],
}
EMOJIS = {
    "good": ["😂", "😊", "🤗", "😍", "🙂"],
    "bad": ["😷", "😭", "😢", "😱", "🤒"],
    "flat": ["🤔", "😐", "🙄", "😎", ""],
}
HASHTAGS = ["#covid19", "#COVID19", "#coronavirus", "#covid_19", "#StayHome", "#nyc",
            "#trump", "#healthcare", "#socialdistancing", "#losangeles"]
MENTIONS = ["@CDCgov", "@NYGovCuomo", "@GavinNewsom", "@WHO", "@realDonaldTrump"]


def _twitter_time(moment: datetime) -> str:
    return moment.astimezone(pytz.utc).strftime(TWITTER_FORMAT)


def _day_weights(n_days: int) -> np.ndarray:
    days = np.arange(n_days)
    weights = 1.0 + 9.0 / (1.0 + np.exp(-(days - 45) / 6.0))
    return weights / weights.sum()


def _hour_weights() -> np.ndarray:
    hours = np.arange(24)
    weights = 0.2 + np.exp(-0.5 * ((hours - 14) / 4.0) ** 2)
    return weights / weights.sum()


def _text(rng: np.random.Generator, day: date) -> str:
    topic = rng.choice(list(TOPICS))
    mood = rng.choice(list(MOODS), p=[0.35, 0.35, 0.30])
    words = rng.choice(TOPICS[topic], size=3, replace=False)
    keyword = "coronavirus" if day < date(2020, 2, 11) or rng.random() < 0.5 else "covid19"
    parts = [str(rng.choice(MOODS[mood])), " ".join(words), keyword]
    if rng.random() < 0.5:
        parts.append(str(rng.choice(HASHTAGS)))
    if rng.random() < 0.2:
        parts.append(str(rng.choice(MENTIONS)))
    emoji_char = str(rng.choice(EMOJIS[mood]))
    if emoji_char and rng.random() < 0.6:
        parts.append(emoji_char)
    return " ".join(parts)


def _geo(rng: np.random.Generator, state: str) -> Dict:
    place = str(rng.choice(STATES[state]["places"]))
    obj = {"place": {"country_code": "US", "full_name": place}}
    if rng.random() < 0.3:
        counties = [c for c in COUNTIES if c[0] == state]
        _, _, x0, y0, x1, y1 = counties[int(rng.integers(len(counties)))]
        lon = round(float(rng.uniform(x0, x1)), 5)
        lat = round(float(rng.uniform(y0, y1)), 5)
        obj["coordinates"] = {"type": "Point", "coordinates": [lon, lat]}
    return obj


def _tweet(tweet_id: int, user_id: str, moment: datetime, text: str, geo: Dict) -> Dict:
    tweet = {"id_str": str(tweet_id), "user": {"id_str": user_id},
             "created_at": _twitter_time(moment), "text": text}
    tweet.update(geo)
    return tweet


def human_tweets(rng: np.random.Generator, n: int, first_id: int, n_users: int = 300) -> List[Dict]:
    n_days = (WINDOW_END - WINDOW_START).days + 1
    day_p, hour_p = _day_weights(n_days), _hour_weights()
    users = [(f"u{i:04d}", "NY" if i % 5 < 3 else "CA") for i in range(n_users)]

    tweets = []
    for k in range(n):
        user_id, state = users[int(rng.integers(n_users))]
        day = WINDOW_START + timedelta(days=int(rng.choice(n_days, p=day_p)))
        hour = int(rng.choice(24, p=hour_p))
        local = pytz.timezone(STATES[state]["tz"]).localize(
            datetime(day.year, day.month, day.day, hour, int(rng.integers(60)), int(rng.integers(60))))
        # local times near midnight can fall outside the UTC window
        utc_day = local.astimezone(pytz.utc).date()
        if not (WINDOW_START <= utc_day <= WINDOW_END):
            local = local + timedelta(hours=12 if utc_day < WINDOW_START else -12)
        tweets.append(_tweet(first_id + k, user_id, local, _text(rng, day), _geo(rng, state)))
    return tweets


def bot_tweets(n: int, first_id: int) -> List[Dict]:
    """One account posting every two hours on the dot."""
    start = pytz.utc.localize(datetime(2020, 1, 26, 0, 0, 0))
    return [
        _tweet(first_id + k, "bot0001", start + timedelta(hours=2 * k),
               f"coronavirus live count update {k} #covid19", {"place": {"country_code": "US", "full_name": "New York, NY"}})
        for k in range(n)
    ]


def noise_lines(rng: np.random.Generator, first_id: int) -> List[str]:
    """Retweets, non-US, keyword misses and one malformed line."""
    moment = pytz.utc.localize(datetime(2020, 3, 20, 15, 0, 0))
    lines = []
    for k in range(20):
        retweet = _tweet(first_id + k, f"u{k:04d}", moment, "RT @someone: coronavirus news",
                         {"place": {"country_code": "US", "full_name": "New York, NY"}})
        lines.append(json.dumps(retweet, ensure_ascii=False, sort_keys=True))
    for k in range(20, 40):
        foreign = _tweet(first_id + k, f"x{k:04d}", moment, "coronavirus in london",
                         {"place": {"country_code": "GB", "full_name": "London, England"}})
        lines.append(json.dumps(foreign, ensure_ascii=False, sort_keys=True))
    for k in range(40, 60):
        miss = _tweet(first_id + k, f"u{k:04d}", moment, "nice weather in the park today",
                      {"place": {"country_code": "US", "full_name": "Los Angeles, CA"}})
        lines.append(json.dumps(miss, ensure_ascii=False, sort_keys=True))
    lines.append('{"id_str": "broken", ')
    return lines


def _logistic_series(first: date, ceiling: float, rate: float, midpoint: int) -> List[Tuple[date, int]]:
    rows = []
    day = first
    while day <= WINDOW_END:
        t = (day - first).days
        rows.append((day, int(max(1.0, ceiling / (1.0 + np.exp(-rate * (t - midpoint)))))))
        day += timedelta(days=1)
    return rows


def write_resources(out: Path) -> Dict[str, Path]:
    paths = {}

    features = [{"type": "Feature", "properties": {"county": county, "state": state},
                 "geometry": mapping(box(x0, y0, x1, y1))}
                for state, county, x0, y0, x1, y1 in COUNTIES]
    paths["boundaries"] = out / "counties.geojson"
    paths["boundaries"].write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n",
                                   encoding="utf-8")

    paths["county_population"] = out / "county_population.csv"
    paths["county_population"].write_text(
        "state,county,population\n" + "".join(
            f"{state},{county},{COUNTY_POPULATION[county]}\n" for state, county, *_ in COUNTIES),
        encoding="utf-8")

    paths["calendar"] = out / "event_calendar.csv"
    paths["calendar"].write_text("state,lockdown,reopen\nNY,2020-03-22,\nCA,2020-03-19,2020-05-08\n", encoding="utf-8")

    paths["population"] = out / "state_population.csv"
    paths["population"].write_text("state,population\nNY,19453561\nCA,39512223\n", encoding="utf-8")

    lines = ["state,date,cum_cases,cum_deaths"]
    for state, first, ceiling in (("CA", date(2020, 1, 26), 70000.0), ("NY", date(2020, 3, 1), 340000.0)):
        cases = _logistic_series(first, ceiling, 0.18, 45)
        deaths = _logistic_series(first + timedelta(days=10), ceiling * 0.06, 0.18, 45)
        death_by_day = dict(deaths)
        for day, value in cases:
            lines.append(f"{state},{day.isoformat()},{value},{death_by_day.get(day, 0)}")
    paths["cases"] = out / "state_cases.csv"
    paths["cases"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    return paths


def write_config(out: Path, resources: Dict[str, Path], seed: int) -> Path:
    config = {
        "ingest": {"primary_inputs": ["tweets.jsonl"], "compensation_inputs": ["compensation.jsonl"],
                   "resolve_state_from_points": True},
        "temporal": {"clock_rules": str(RESOURCES / "state_clock_rules.csv"), "top_states": 2},
        "engagement": {"calendar": resources["calendar"].name},
        "geo": {"population": resources["population"].name, "cases": resources["cases"].name,
                "boundaries": resources["boundaries"].name, "county_population": resources["county_population"].name,
                "cache_path": "geocode_cache.json"},
        "content": {"stopwords": str(RESOURCES / "stopwords.txt"),
                    "hashtag_categories": str(RESOURCES / "hashtag_categories.csv"),
                    "k_candidates": [2, 3, 4], "passes": 40, "repeats": 2, "report_top": 10},
        "sentiment": {"lexicon": str(RESOURCES / "sentiment_lexicon.csv"),
                      "emoji_table": str(RESOURCES / "emoji_categories.csv"),
                      "event_states": ["NY", "CA"], "reopen_states": ["CA"]},
        "execution": {"out_dir": "output", "seed": seed},
    }
    path = out / "config.yaml"
    path.write_text(yaml.safe_dump(config, sort_keys=True, allow_unicode=True), encoding="utf-8")
    return path


def generate(out_dir, n_tweets: int = 5000, seed: int = 7, bot_count: int = 1100) -> Dict[str, Path]:
    """
    Write the synthetic corpus and its resources; returns the written paths.

    n_tweets counts the human + bot tweets of the primary stream.
    """
    if n_tweets <= bot_count:
        raise ValueError(f"n_tweets ({n_tweets}) must exceed the bot volume ({bot_count})")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    humans = human_tweets(rng, n_tweets - bot_count, first_id=1_000_000)
    bot = bot_tweets(bot_count, first_id=5_000_000)
    primary = [json.dumps(t, ensure_ascii=False, sort_keys=True) for t in humans + bot]
    primary += noise_lines(rng, first_id=9_000_000)

    # second collector: every 10th human tweet again, plus 50 of its own
    extra = human_tweets(rng, 50, first_id=7_000_000)
    compensation = [json.dumps(t, ensure_ascii=False, sort_keys=True) for t in humans[::10] + extra]

    paths = write_resources(out)
    paths["primary"] = out / "tweets.jsonl"
    paths["primary"].write_text("\n".join(primary) + "\n", encoding="utf-8")
    paths["compensation"] = out / "compensation.jsonl"
    paths["compensation"].write_text("\n".join(compensation) + "\n", encoding="utf-8")
    paths["config"] = write_config(out, paths, seed)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Write a deterministic synthetic tweet corpus")
    parser.add_argument("--out", default="demo", help="Output directory (default: demo)")
    parser.add_argument("--tweets", type=int, default=5000, help="Primary tweets incl. the bot (default: 5000)")
    parser.add_argument("--seed", type=int, default=7, help="Generator seed (default: 7)")
    args = parser.parse_args(argv)

    print("\n" + "=" * 70)
    print("🧪 SYNTHETIC CORPUS")
    print("=" * 70)
    try:
        paths = generate(args.out, n_tweets=args.tweets, seed=args.seed)
    except ValueError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    for name, path in sorted(paths.items()):
        print(f"   ✅ {name:18s} {path}")
    print(f"\n   python run_analysis.py all --config {paths['config']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
