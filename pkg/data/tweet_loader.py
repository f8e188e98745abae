"""
Tweet Archive Loader

Reads archived tweet JSON lines (optionally gzip) into normalized TweetRecords.

Pipeline per record:
    parse -> collection window -> retweet -> keyword filter
then, serialized:
    dedup / merge (primary files first, first seen wins)
    -> per-user activity accumulation (feeds bot detection, pre-geo)
    -> US geo filter

Every rejection is counted so that
    output = lines - skips - retweets - keyword - duplicates - geo
holds exactly.
"""

import gzip
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

import pandas as pd
import pytz
from joblib import Parallel, delayed

from core.models import (
    GeoTag, TweetRecord, UserActivity,
    PRECISION_BOUNDING_PLACE, PRECISION_EXACT_GPS, PRECISION_NONE,
    SOURCE_COMPENSATION, SOURCE_PRIMARY,
)
from core.states import is_state, state_from_place


TWITTER_DATE_FORMAT = "%a %b %d %H:%M:%S %z %Y"
RETWEET_PREFIX = "RT @"

SKIP_REASONS = ("malformed", "missing_fields", "bad_timestamp", "out_of_window")
GEO_REASONS = ("non_us", "no_state", "ambiguous")

# Point -> state abbreviation (or None), used when a record has GPS but no usable place
PointStateResolver = Callable[[Tuple[float, float]], Optional[str]]


# ============================================================================
# KEYWORD FILTER
# ============================================================================

@dataclass(frozen=True)
class KeywordFilter:
    """
    Case-insensitive substring keyword set.

    additions only match on/after additions_effective.
    """
    keywords: frozenset
    additions: frozenset = frozenset()
    additions_effective: date = date(2020, 2, 11)

    def __post_init__(self):
        if not self.keywords and not self.additions:
            raise ValueError("keyword set is empty")

    @classmethod
    def from_lists(cls, base: Iterable[str], additions: Iterable[str] = (),
                   effective: date = date(2020, 2, 11)) -> "KeywordFilter":
        return cls(
            keywords=frozenset(k.lower() for k in base if k),
            additions=frozenset(k.lower() for k in additions if k),
            additions_effective=effective,
        )

    def active(self, tweet_date: date) -> frozenset:
        if tweet_date >= self.additions_effective:
            return self.keywords | self.additions
        return self.keywords


def keyword_match(text: str, keyword_filter: KeywordFilter, tweet_date: date) -> bool:
    """True iff text contains an active keyword (substring, case-insensitive)."""
    if not text:
        return False
    lowered = text.lower()
    return any(k in lowered for k in keyword_filter.active(tweet_date))


# ============================================================================
# PARSING
# ============================================================================

def parse_timestamp(value: Any) -> Optional[datetime]:
    """
    Twitter 'Wed Feb 05 18:00:00 +0000 2020' or ISO-8601, to UTC floored to the second.
    Naive timestamps are taken as UTC.
    """
    if value is None or value == "":
        return None
    if isinstance(value, str):
        try:
            parsed = datetime.strptime(value, TWITTER_DATE_FORMAT)
            return parsed.astimezone(pytz.utc).replace(microsecond=0)
        except ValueError:
            pass
    try:
        ts = pd.Timestamp(value)
    except (ValueError, TypeError):
        return None
    if pd.isna(ts):
        return None
    ts = ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")
    return ts.floor("s").to_pydatetime()


def _first_present(obj: Dict[str, Any], *keys: str) -> Any:
    for key in keys:
        value = obj.get(key)
        if value is not None and value != "":
            return value
    return None


def _extract_point(obj: Dict[str, Any]) -> Optional[Tuple[float, float]]:
    """coordinates as [lon, lat] or GeoJSON {'type': 'Point', 'coordinates': [lon, lat]} -> (lat, lon)."""
    coords = obj.get("coordinates")
    if isinstance(coords, dict):
        coords = coords.get("coordinates")
    if not isinstance(coords, (list, tuple)) or len(coords) != 2:
        return None
    try:
        lon, lat = float(coords[0]), float(coords[1])
    except (TypeError, ValueError):
        return None
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        return None
    return (lat, lon)


def _extract_geo(obj: Dict[str, Any]) -> GeoTag:
    place = obj.get("place") or {}
    country_code = place.get("country_code") or None
    full_name = place.get("full_name") or None
    point = _extract_point(obj)

    state = None
    if country_code == "US":
        state, _ = state_from_place(full_name)

    if point is not None:
        precision = PRECISION_EXACT_GPS
    elif place:
        precision = PRECISION_BOUNDING_PLACE
    else:
        precision = PRECISION_NONE

    return GeoTag(country_code=country_code, state=state, point=point,
                  precision=precision, place_name=full_name)


def parse_tweet_json(line: str, source_corpus: str = SOURCE_PRIMARY) -> Tuple[Optional[TweetRecord], Optional[str]]:
    """
    Parse one JSON line.

    Returns:
        (record, None) on success, (None, reason) otherwise.
        reason is one of 'malformed', 'missing_fields', 'bad_timestamp'.
    """
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, TypeError):
        return None, "malformed"
    if not isinstance(obj, dict):
        return None, "malformed"

    user = obj.get("user") if isinstance(obj.get("user"), dict) else {}
    tweet_id = _first_present(obj, "tweet_id", "id_str", "id")
    user_id = _first_present(obj, "user_id") or _first_present(user, "id_str", "id")

    extended = obj.get("extended_tweet") if isinstance(obj.get("extended_tweet"), dict) else {}
    text = _first_present(extended, "full_text") or _first_present(obj, "full_text", "text")
    created = obj.get("created_at")

    if tweet_id is None or user_id is None or text is None or created is None:
        return None, "missing_fields"

    created_at = parse_timestamp(created)
    if created_at is None:
        return None, "bad_timestamp"

    try:
        geo = _extract_geo(obj)
    except ValueError:
        return None, "malformed"

    text = str(text)
    is_retweet = "retweeted_status" in obj or text.startswith(RETWEET_PREFIX)

    record = TweetRecord(
        tweet_id=str(tweet_id),
        user_id=str(user_id),
        created_at_utc=created_at,
        text=text,
        geo=geo,
        is_retweet=is_retweet,
        source_corpus=source_corpus,
    )
    return record, None


# ============================================================================
# GEO ACCEPTANCE
# ============================================================================

def geotag_status(record: TweetRecord, point_resolver: Optional[PointStateResolver] = None) -> Tuple[Optional[str], str]:
    """
    State for a record and the acceptance status ('ok' or one of GEO_REASONS).
    """
    geo = record.geo
    if geo.country_code != "US":
        return None, "non_us"
    if is_state(geo.state):
        return geo.state, "ok"
    _, status = state_from_place(geo.place_name)
    if geo.point is not None and point_resolver is not None:
        state = point_resolver(geo.point)
        if is_state(state):
            return state, "ok"
    return None, "ambiguous" if status == "ambiguous" else "no_state"


def accept_us_geotag(record: TweetRecord, point_resolver: Optional[PointStateResolver] = None) -> bool:
    """True iff country_code is US and a state among the 50 + DC is resolvable."""
    _, status = geotag_status(record, point_resolver)
    return status == "ok"


# ============================================================================
# MERGE / DEDUP
# ============================================================================

class DedupReducer:
    """
    Serialized dedup point: the first record seen for a tweet_id survives.

    Feed primary streams before compensation streams so primary wins collisions.
    """

    def __init__(self):
        self.seen: Set[str] = set()
        self.duplicates = 0

    def offer(self, record: TweetRecord) -> bool:
        if record.tweet_id in self.seen:
            self.duplicates += 1
            return False
        self.seen.add(record.tweet_id)
        return True


def daily_source_counts(records: Iterable[TweetRecord]) -> pd.DataFrame:
    """Per UTC day and source_corpus record counts (date, source_corpus, count)."""
    counts = Counter((r.created_at_utc.date().isoformat(), r.source_corpus) for r in records)
    rows = [(d, s, n) for (d, s), n in sorted(counts.items())]
    return pd.DataFrame(rows, columns=["date", "source_corpus", "count"])


def merge_corpora(primary: Iterable[TweetRecord], compensation: Iterable[TweetRecord]) -> Tuple[List[TweetRecord], int, pd.DataFrame]:
    """
    Union keyed by tweet_id, primary wins collisions.

    Returns:
        (merged records, duplicate count, per-day counts by source_corpus)
    """
    reducer = DedupReducer()
    merged = [r for r in primary if reducer.offer(r)]
    merged.extend(r for r in compensation if reducer.offer(r))
    return merged, reducer.duplicates, daily_source_counts(merged)


# ============================================================================
# FULL INGEST
# ============================================================================

@dataclass
class IngestResult:
    records: List[TweetRecord] = field(default_factory=list)
    counters: Dict[str, Any] = field(default_factory=dict)
    activities: Dict[str, UserActivity] = field(default_factory=dict)
    source_daily: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def compensation_share(self) -> float:
        if not self.records:
            return 0.0
        n = sum(1 for r in self.records if r.source_corpus == SOURCE_COMPENSATION)
        return n / len(self.records)


def _open_text(path: Path):
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def iter_lines(path) -> Iterator[str]:
    """Non-blank lines of an NDJSON file (gzip by suffix)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    with _open_text(path) as f:
        for line in f:
            if line.strip():
                yield line


def _filter_file(path: str, source_corpus: str, window: Tuple[date, date],
                 keyword_filter: KeywordFilter) -> Tuple[List[TweetRecord], Counter]:
    """Per-record stages for one file; pure, safe to run in a worker."""
    counts: Counter = Counter()
    kept: List[TweetRecord] = []
    start, end = window

    for line in iter_lines(path):
        counts["lines"] += 1
        record, reason = parse_tweet_json(line, source_corpus)
        if record is None:
            counts[reason] += 1
            continue
        day = record.created_at_utc.date()
        if not (start <= day <= end):
            counts["out_of_window"] += 1
            continue
        if record.is_retweet:
            counts["retweets"] += 1
            continue
        if not keyword_match(record.text, keyword_filter, day):
            counts["keyword"] += 1
            continue
        kept.append(record)

    return kept, counts


def load_corpus(
    primary_paths: List[str],
    compensation_paths: List[str],
    keyword_filter: KeywordFilter,
    window: Tuple[date, date],
    point_resolver: Optional[PointStateResolver] = None,
    workers: int = 1,
) -> IngestResult:
    """
    Run the full ingest pipeline.

    Files are parsed in parallel (joblib); dedup, activity accumulation and
    the geo filter run serially in file order, primary files first.
    """
    jobs = [(str(p), SOURCE_PRIMARY) for p in primary_paths] + \
           [(str(p), SOURCE_COMPENSATION) for p in compensation_paths]

    for path, _ in jobs:
        if not Path(path).exists():
            raise FileNotFoundError(f"Input file not found: {path}")

    if workers > 1 and len(jobs) > 1:
        per_file = Parallel(n_jobs=workers)(
            delayed(_filter_file)(path, source, window, keyword_filter) for path, source in jobs
        )
    else:
        per_file = [_filter_file(path, source, window, keyword_filter) for path, source in jobs]

    totals: Counter = Counter()
    reducer = DedupReducer()
    timestamps: Dict[str, List[datetime]] = defaultdict(list)
    geo_counts: Counter = Counter()
    output: List[TweetRecord] = []

    for kept, counts in per_file:
        totals.update(counts)
        for record in kept:
            if not reducer.offer(record):
                continue
            timestamps[record.user_id].append(record.created_at_utc)

            state, status = geotag_status(record, point_resolver)
            if status != "ok":
                geo_counts[status] += 1
                continue
            if state != record.geo.state:
                geo = record.geo
                record = record.with_geo(GeoTag(
                    country_code=geo.country_code, state=state, county=geo.county,
                    point=geo.point, precision=geo.precision, place_name=geo.place_name,
                ))
            output.append(record)

    skips = {reason: int(totals.get(reason, 0)) for reason in SKIP_REASONS}
    geo_rejections = {reason: int(geo_counts.get(reason, 0)) for reason in GEO_REASONS}
    counters = {
        "lines": int(totals.get("lines", 0)),
        "skips": skips,
        "skipped": sum(skips.values()),
        "retweets": int(totals.get("retweets", 0)),
        "keyword_rejected": int(totals.get("keyword", 0)),
        "duplicates": reducer.duplicates,
        "geo_rejected": sum(geo_rejections.values()),
        "geo_rejections": geo_rejections,
        "output": len(output),
    }
    counters["reconciles"] = counters_reconcile(counters)

    activities = {
        user_id: UserActivity.from_timestamps(user_id, ts)
        for user_id, ts in sorted(timestamps.items())
    }

    result = IngestResult(
        records=output,
        counters=counters,
        activities=activities,
        source_daily=daily_source_counts(output),
    )
    counters["compensation_records"] = sum(1 for r in output if r.source_corpus == SOURCE_COMPENSATION)
    counters["compensation_share"] = result.compensation_share
    return result


def counters_reconcile(counters: Dict[str, Any]) -> bool:
    expected = (counters["lines"] - counters["skipped"] - counters["retweets"]
                - counters["keyword_rejected"] - counters["duplicates"] - counters["geo_rejected"])
    return expected == counters["output"]


# ============================================================================
# CANONICAL RECORD FILE
# ============================================================================

def write_records(records: Iterable[TweetRecord], path) -> int:
    """NDJSON of TweetRecord, sorted by tweet_id; returns the row count."""
    ordered = sorted(records, key=lambda r: r.tweet_id)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in ordered:
            f.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True))
            f.write("\n")
    return len(ordered)


def read_records(path) -> List[TweetRecord]:
    return [TweetRecord.from_dict(json.loads(line)) for line in iter_lines(path)]
