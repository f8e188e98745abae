"""
Core data models for the geo-tagged tweet pipeline

Defines the standard object types that pipeline stages exchange:
- GeoTag, TweetRecord: one normalized tweet and its location
- UserActivity: per-user posting history used by bot detection
- StateClockRule, Phase: local-time and period tables
- HourWeekMatrix: 7x24 tweet counts, the substrate of the engagement math
- EngagementReport: H(i) / D(j) values for one state and one 7-day window
- StateStats, CountyResolution: geographic normalization inputs/outputs
- TagTable: hashtag / mention counts
- CorrelationResult, ManovaResult: statistical kernel outputs
- StepResult: standard output format of every pipeline step
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import pytz


# ============================================================================
# CORPUS RECORDS
# ============================================================================

PRECISION_EXACT_GPS = "exact_gps"
PRECISION_BOUNDING_PLACE = "bounding_place"
PRECISION_NONE = "none"

SOURCE_PRIMARY = "primary"
SOURCE_COMPENSATION = "compensation"


@dataclass(frozen=True)
class GeoTag:
    """
    Location attached to a tweet.

    Attributes:
        country_code: 2-letter code from the place attribute (None if absent)
        state: two-letter abbreviation among the 50 states + DC, or None
        county: county name (only filled by county resolution)
        point: (lat, lon) in degrees when the tweet carries exact coordinates
        precision: 'exact_gps', 'bounding_place' or 'none'
        place_name: raw place full name, kept for auditing state extraction
    """
    country_code: Optional[str] = None
    state: Optional[str] = None
    county: Optional[str] = None
    point: Optional[Tuple[float, float]] = None
    precision: str = PRECISION_NONE
    place_name: Optional[str] = None

    def __post_init__(self):
        if self.precision == PRECISION_EXACT_GPS:
            if self.point is None:
                raise ValueError("exact_gps geo tag without a point")
            lat, lon = self.point
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise ValueError(f"coordinate out of range: {self.point}")
        if self.state is not None and self.country_code != "US":
            raise ValueError(f"state {self.state} set on non-US geo tag ({self.country_code})")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "country_code": self.country_code,
            "state": self.state,
            "county": self.county,
            "point": list(self.point) if self.point is not None else None,
            "precision": self.precision,
            "place_name": self.place_name,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeoTag":
        point = data.get("point")
        return cls(
            country_code=data.get("country_code"),
            state=data.get("state"),
            county=data.get("county"),
            point=(float(point[0]), float(point[1])) if point else None,
            precision=data.get("precision", PRECISION_NONE),
            place_name=data.get("place_name"),
        )


@dataclass(frozen=True)
class TweetRecord:
    """
    One normalized tweet.

    created_at_utc is timezone-aware (UTC) with second precision.
    """
    tweet_id: str
    user_id: str
    created_at_utc: datetime
    text: str
    geo: GeoTag = field(default_factory=GeoTag)
    is_retweet: bool = False
    source_corpus: str = SOURCE_PRIMARY

    @property
    def state(self) -> Optional[str]:
        return self.geo.state

    def with_geo(self, geo: GeoTag) -> "TweetRecord":
        return TweetRecord(
            tweet_id=self.tweet_id,
            user_id=self.user_id,
            created_at_utc=self.created_at_utc,
            text=self.text,
            geo=geo,
            is_retweet=self.is_retweet,
            source_corpus=self.source_corpus,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tweet_id": self.tweet_id,
            "user_id": self.user_id,
            "created_at_utc": self.created_at_utc.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": self.text,
            "geo": self.geo.to_dict(),
            "is_retweet": self.is_retweet,
            "source_corpus": self.source_corpus,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TweetRecord":
        created = datetime.strptime(data["created_at_utc"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=pytz.utc)
        return cls(
            tweet_id=str(data["tweet_id"]),
            user_id=str(data["user_id"]),
            created_at_utc=created,
            text=data.get("text", ""),
            geo=GeoTag.from_dict(data.get("geo") or {}),
            is_retweet=bool(data.get("is_retweet", False)),
            source_corpus=data.get("source_corpus", SOURCE_PRIMARY),
        )


def records_to_frame(records: List[TweetRecord]) -> pd.DataFrame:
    """Flat DataFrame view of records (one row per tweet) for vectorized stages."""
    columns = ["tweet_id", "user_id", "created_at_utc", "text", "state", "county",
               "lat", "lon", "precision", "source_corpus"]
    if not records:
        frame = pd.DataFrame(columns=columns)
        frame["created_at_utc"] = pd.to_datetime(frame["created_at_utc"], utc=True)
        return frame
    rows = []
    for r in records:
        lat, lon = r.geo.point if r.geo.point is not None else (np.nan, np.nan)
        rows.append({
            "tweet_id": r.tweet_id,
            "user_id": r.user_id,
            "created_at_utc": r.created_at_utc,
            "text": r.text,
            "state": r.geo.state,
            "county": r.geo.county,
            "lat": lat,
            "lon": lon,
            "precision": r.geo.precision,
            "source_corpus": r.source_corpus,
        })
    frame = pd.DataFrame(rows, columns=columns)
    frame["created_at_utc"] = pd.to_datetime(frame["created_at_utc"], utc=True)
    return frame


# ============================================================================
# USER ACTIVITY
# ============================================================================

@dataclass
class UserActivity:
    """
    Posting history of one user.

    interval_histogram maps an inter-tweet gap (whole seconds, floored) to how
    many consecutive tweet pairs had that gap.
    """
    user_id: str
    tweet_count: int = 0
    sorted_timestamps: List[datetime] = field(default_factory=list)
    interval_histogram: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_timestamps(cls, user_id: str, timestamps: List[datetime]) -> "UserActivity":
        ordered = sorted(timestamps)
        histogram: Dict[int, int] = {}
        for previous, current in zip(ordered, ordered[1:]):
            gap = int(np.floor((current - previous).total_seconds()))
            histogram[gap] = histogram.get(gap, 0) + 1
        return cls(user_id=user_id, tweet_count=len(ordered),
                   sorted_timestamps=ordered, interval_histogram=histogram)

    def check(self) -> bool:
        total = sum(self.interval_histogram.values())
        if self.tweet_count >= 1 and total != self.tweet_count - 1:
            raise ValueError(f"histogram total {total} != tweet_count - 1 for user {self.user_id}")
        if any(b < a for a, b in zip(self.sorted_timestamps, self.sorted_timestamps[1:])):
            raise ValueError(f"timestamps not sorted for user {self.user_id}")
        return True


# ============================================================================
# TIME TABLES
# ============================================================================

@dataclass(frozen=True)
class StateClockRule:
    """Standard offset and DST window for one state (dominant time zone)."""
    state: str
    std_offset: int
    observes_dst: bool
    dst_start: Optional[date] = None
    dst_end: Optional[date] = None


@dataclass(frozen=True)
class Phase:
    id: str
    start: date
    end: date

    def contains(self, day: date) -> bool:
        return self.start <= day <= self.end


# ============================================================================
# HOUR-OF-WEEK MATRIX
# ============================================================================

BUSINESS_HOURS = tuple(range(8, 17))   # 8:00 - 16:59, nine slots
WORKDAYS = (1, 2, 3, 4, 5)
WEEKEND = (6, 7)
DAY_LABELS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]


@dataclass
class HourWeekMatrix:
    """
    7x24 tweet counts h_i^j.

    Row j-1 holds day j (1=Monday ... 7=Sunday), column i holds hour i (0..23).
    Totals are always derived from counts, never stored separately.
    """
    counts: np.ndarray = field(default_factory=lambda: np.zeros((7, 24), dtype=np.int64))

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (7, 24):
            raise ValueError(f"HourWeekMatrix needs a 7x24 grid, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise ValueError("HourWeekMatrix counts must be non-negative")

    def day_total(self, day: int) -> int:
        return int(self.counts[day - 1].sum())

    @property
    def day_totals(self) -> List[int]:
        return [int(v) for v in self.counts.sum(axis=1)]

    @property
    def workday_total(self) -> int:
        return int(self.counts[0:5].sum())

    @property
    def weekend_total(self) -> int:
        return int(self.counts[5:7].sum())

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def workday_hour(self, hour: int) -> int:
        return int(self.counts[0:5, hour].sum())

    def weekend_hour(self, hour: int) -> int:
        return int(self.counts[5:7, hour].sum())

    def business_count(self, day: int) -> int:
        return int(self.counts[day - 1, BUSINESS_HOURS[0]:BUSINESS_HOURS[-1] + 1].sum())

    def __add__(self, other: "HourWeekMatrix") -> "HourWeekMatrix":
        return HourWeekMatrix(self.counts + other.counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HourWeekMatrix) and np.array_equal(self.counts, other.counts)

    def check(self) -> bool:
        """Derived totals must agree with the grid."""
        if sum(self.day_totals) != self.total:
            raise ValueError("day totals do not sum to the matrix total")
        if self.workday_total + self.weekend_total != self.total:
            raise ValueError("workday + weekend totals do not match the matrix total")
        return True

    def to_frame(self) -> pd.DataFrame:
        """Long format: weekday (1..7), hour, count."""
        days, hours = np.meshgrid(np.arange(1, 8), np.arange(24), indexing="ij")
        return pd.DataFrame({
            "weekday": days.ravel(),
            "hour": hours.ravel(),
            "count": self.counts.ravel(),
        })


# ============================================================================
# ENGAGEMENT
# ============================================================================

ANCHOR_LOCKDOWN = "lockdown"
ANCHOR_REOPEN = "reopen"


@dataclass
class EventCalendar:
    """Per-state lockdown (stay-at-home) and reopen dates."""
    lockdown: Dict[str, date] = field(default_factory=dict)
    reopen: Dict[str, date] = field(default_factory=dict)

    def __post_init__(self):
        for state, reopen_date in self.reopen.items():
            lockdown_date = self.lockdown.get(state)
            if lockdown_date is not None and reopen_date <= lockdown_date:
                raise ValueError(f"{state}: reopen date {reopen_date} is not after lockdown date {lockdown_date}")

    def anchor(self, state: str, kind: str) -> Optional[date]:
        if kind == ANCHOR_LOCKDOWN:
            return self.lockdown.get(state)
        if kind == ANCHOR_REOPEN:
            return self.reopen.get(state)
        raise ValueError(f"unknown anchor '{kind}' (expected lockdown or reopen)")

    @property
    def states(self) -> List[str]:
        return sorted(set(self.lockdown) | set(self.reopen))


@dataclass
class EngagementReport:
    """
    Hourly H(i) and daily D(j) engagement for one state and one 7-day window.

    Undefined cells are None (never coerced to -1 or 0).
    """
    state: str
    window_start: date
    window_end: date
    offset: int = 0
    anchor: str = ""
    n_tweets: int = 0
    hourly: Dict[int, Optional[float]] = field(default_factory=dict)
    daily: Dict[int, Optional[float]] = field(default_factory=dict)

    @staticmethod
    def _mean_std(values: List[Optional[float]]) -> Tuple[Optional[float], Optional[float]]:
        defined = [v for v in values if v is not None]
        if not defined:
            return None, None
        arr = np.asarray(defined, dtype=float)
        return float(arr.mean()), float(arr.std(ddof=0))

    @property
    def hourly_mean(self) -> Optional[float]:
        return self._mean_std(list(self.hourly.values()))[0]

    @property
    def hourly_std(self) -> Optional[float]:
        return self._mean_std(list(self.hourly.values()))[1]

    @property
    def daily_mean(self) -> Optional[float]:
        return self._mean_std(list(self.daily.values()))[0]

    @property
    def daily_std(self) -> Optional[float]:
        return self._mean_std(list(self.daily.values()))[1]


# ============================================================================
# GEOGRAPHY
# ============================================================================

@dataclass(frozen=True)
class StateStats:
    state: str
    population: int
    cum_cases: int = 0
    cum_deaths: int = 0
    tweet_count: int = 0

    def __post_init__(self):
        if self.population <= 0:
            raise ValueError(f"population must be positive for {self.state}")
        if not (self.cum_cases >= self.cum_deaths >= 0):
            raise ValueError(f"expected cases >= deaths >= 0 for {self.state}")


METHOD_REMOTE = "remote_geocoder"
METHOD_POLYGON = "polygon_lookup"
METHOD_CACHE = "cache"


@dataclass(frozen=True)
class CountyResolution:
    point: Tuple[float, float]
    county: Optional[str]
    state: Optional[str]
    method: str

    def __post_init__(self):
        if self.county is not None and self.state is None:
            raise ValueError("county resolved without a state")


# ============================================================================
# CONTENT
# ============================================================================

@dataclass
class TagTable:
    """Counts of hashtags or mentions (normalized, sigil removed)."""
    kind: str
    entries: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return int(sum(self.entries.values()))

    def share(self, tag: str) -> float:
        return self.entries.get(tag, 0) / self.total if self.total else 0.0

    def to_frame(self, exclude: Optional[List[str]] = None, top: Optional[int] = None) -> pd.DataFrame:
        """tag, count, share sorted by count desc then tag asc; share is over the full total."""
        excluded = set(exclude or [])
        total = self.total
        rows = [(tag, count, count / total if total else 0.0)
                for tag, count in self.entries.items() if tag not in excluded]
        rows.sort(key=lambda r: (-r[1], r[0]))
        if top is not None:
            rows = rows[:top]
        return pd.DataFrame(rows, columns=["tag", "count", "share"])


# ============================================================================
# STATISTICS
# ============================================================================

@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    p_value: Optional[float]


@dataclass(frozen=True)
class ManovaResult:
    wilks_lambda: float
    approx_F: float
    df1: float
    df2: float
    p_value: float
    n_groups: int = 0
    n_observations: int = 0
    components: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "wilks_lambda": self.wilks_lambda,
            "approx_F": self.approx_F,
            "df1": self.df1,
            "df2": self.df2,
            "p_value": self.p_value,
            "n_groups": self.n_groups,
            "n_observations": self.n_observations,
            "components": list(self.components),
        }


# ============================================================================
# STEP RESULT
# ============================================================================

@dataclass
class StepResult:
    """
    Standard output format for all pipeline steps

    Steps return this object containing:
    - tables: plot-ready DataFrames, written as CSV artifacts
    - documents: JSON-serializable dicts, written as JSON artifacts
    - records: TweetRecord lists, written as NDJSON record files
    - meta: counters, notices, seeds (also copied into the run manifest)

    Example:
        result = StepResult()
        result.add_table('state_share', frame)
        result.add_document('ingest_counters', counters)
        result.add_notice('2 states excluded from per_death table (zero deaths)')
    """
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    records: Dict[str, List[TweetRecord]] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    def add_table(self, name: str, frame: pd.DataFrame):
        self.tables[name] = frame

    def add_document(self, name: str, document: Dict[str, Any]):
        self.documents[name] = document

    def add_records(self, name: str, records: List[TweetRecord]):
        self.records[name] = records

    def add_meta(self, key: str, value: Any):
        self.meta[key] = value

    def add_notice(self, message: str):
        self.meta.setdefault("notices", []).append(message)

    @property
    def notices(self) -> List[str]:
        return list(self.meta.get("notices", []))

    def merge(self, other: "StepResult"):
        self.tables.update(other.tables)
        self.documents.update(other.documents)
        self.records.update(other.records)
        for notice in other.notices:
            self.add_notice(notice)
        for key, value in other.meta.items():
            if key != "notices":
                self.meta[key] = value
