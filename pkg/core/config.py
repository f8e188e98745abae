"""
Configuration centralisée du pipeline

One YAML file, one dataclass per section. Dataclass defaults are the
documented defaults; YAML values override them and CLI flags override YAML.
Relative resource paths are resolved against the directory of the YAML file.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field, asdict, fields
from datetime import date
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
import yaml
from dotenv import load_dotenv

from analysis.content_mining import load_hashtag_categories, load_stopwords
from analysis.geospatial import load_boundaries
from analysis.sentiment import load_emoji_table, load_lexicon
from core.states import load_clock_rules, normalize_state
from data.resources import load_cases, load_county_population, load_event_calendar, load_population


GEOCODER_CONTACT_ENV = "GEOTWEETS_GEOCODER_CONTACT"


def _to_date(value) -> Optional[date]:
    if value is None or value == "":
        return None
    if isinstance(value, date):
        return value
    return pd.Timestamp(str(value)).date()


@dataclass
class IngestConfig:
    """corpus_ingest"""
    primary_inputs: List[str] = field(default_factory=list)
    compensation_inputs: List[str] = field(default_factory=list)
    window_start: date = date(2020, 1, 25)
    window_end: date = date(2020, 5, 10)
    base_keywords: List[str] = field(default_factory=lambda: ["coronavirus", "wuhan", "corona", "ncov"])
    added_keywords: List[str] = field(default_factory=lambda: [
        "covid19", "covidー19", "coronapocalypse", "coronavid19", "covid_19", "covid-19", "covid",
    ])
    added_keywords_effective: date = date(2020, 2, 11)
    resolve_state_from_points: bool = False


@dataclass
class CleaningConfig:
    """corpus_clean - bot rules"""
    cap: int = 5000
    floor: int = 1000
    coverage: float = 0.90
    top_intervals: int = 3


@dataclass
class PhaseConfig:
    id: str
    start: date
    end: date


def _default_phases() -> List[PhaseConfig]:
    return [
        PhaseConfig("P1", date(2020, 1, 25), date(2020, 2, 24)),
        PhaseConfig("P2", date(2020, 2, 25), date(2020, 3, 14)),
        PhaseConfig("P3", date(2020, 3, 15), date(2020, 5, 10)),
    ]


@dataclass
class TemporalConfig:
    clock_rules: str = "resources/state_clock_rules.csv"
    phases: List[PhaseConfig] = field(default_factory=_default_phases)
    excluded_dates: List[date] = field(default_factory=list)
    top_states: int = 10


@dataclass
class EngagementConfig:
    calendar: str = "resources/event_calendar.csv"
    lockdown_weeks_before: int = 5
    lockdown_weeks_after: int = 3
    reopen_weeks_before: int = 0
    reopen_weeks_after: int = 0


@dataclass
class GeoConfig:
    population: str = "resources/state_population.csv"
    cases: str = "resources/state_cases.csv"
    snapshot_date: Optional[date] = None  # None -> window end
    county_mode: str = "polygon"  # polygon | remote
    boundaries: Optional[str] = None
    county_field: str = "county"
    state_field: str = "state"
    county_population: Optional[str] = None
    cache_path: Optional[str] = None
    geocoder_domain: str = "nominatim.openstreetmap.org"
    geocoder_scheme: str = "https"
    min_delay_seconds: float = 1.0
    max_retries: int = 2
    geocoder_contact: Optional[str] = None


@dataclass
class ContentConfig:
    stopwords: str = "resources/stopwords.txt"
    min_token_length: int = 2
    canonical_tag: str = "covid19"
    tag_variants: List[str] = field(default_factory=lambda: [
        "covid_19", "coronavid19", "covid-19", "covid2019", "covid_2019", "covidー19", "covid",
    ])
    hashtag_categories: Optional[str] = "resources/hashtag_categories.csv"
    top_tags: int = 40
    unique_by: str = "id"  # id | text
    k_candidates: List[int] = field(default_factory=lambda: [2, 4, 6, 8, 10, 12, 14])
    topic_count: Optional[int] = None  # None -> elbow choice
    passes: int = 500
    repeats: int = 10
    alpha: Optional[float] = None  # None -> 50 / K
    beta: float = 0.01
    weighting: str = "tfidf_scaled"  # bow | tfidf_scaled
    tfidf_scale: int = 10
    coherence_top_n: int = 10
    coherence_window: int = 110
    elbow_threshold: float = 0.05
    report_top: int = 40


@dataclass
class SentimentConfig:
    lexicon: str = "resources/sentiment_lexicon.csv"
    emoji_table: str = "resources/emoji_categories.csv"
    subjectivity_thresholds: List[float] = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    polarity_thresholds: List[float] = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    weighting: str = "occurrence"  # occurrence | tweet
    event_window_days: int = 7
    event_states: List[str] = field(default_factory=lambda: ["CA", "TX", "FL", "NY", "GA", "PA", "IL", "MD", "VA", "AZ"])
    reopen_states: List[str] = field(default_factory=lambda: ["TX", "GA", "TN", "CO", "AL", "MS", "ID", "AK", "MT"])
    top_emojis: int = 10


@dataclass
class StatsConfig:
    r_threshold: float = 0.8
    p_threshold: float = 0.001
    manova_components: List[int] = field(default_factory=lambda: [0, 1])


@dataclass
class ExecutionConfig:
    out_dir: str = "output"
    seed: int = 2020
    workers: int = 1
    quiet: bool = False
    states: List[str] = field(default_factory=list)


@dataclass
class RunConfig:
    """Complete run configuration (all sections)."""
    ingest: IngestConfig = field(default_factory=IngestConfig)
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)
    engagement: EngagementConfig = field(default_factory=EngagementConfig)
    geo: GeoConfig = field(default_factory=GeoConfig)
    content: ContentConfig = field(default_factory=ContentConfig)
    sentiment: SentimentConfig = field(default_factory=SentimentConfig)
    stats: StatsConfig = field(default_factory=StatsConfig)
    execution: ExecutionConfig = field(default_factory=ExecutionConfig)
    base_dir: str = "."

    # ------------------------------------------------------------------

    def resolve(self, path: Optional[str]) -> Optional[Path]:
        """Resolve a resource path against the config directory."""
        if path is None or path == "":
            return None
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def resource_paths(self) -> Dict[str, Optional[Path]]:
        return {
            "temporal.clock_rules": self.resolve(self.temporal.clock_rules),
            "engagement.calendar": self.resolve(self.engagement.calendar),
            "geo.population": self.resolve(self.geo.population),
            "geo.cases": self.resolve(self.geo.cases),
            "geo.boundaries": self.resolve(self.geo.boundaries),
            "geo.county_population": self.resolve(self.geo.county_population),
            "content.stopwords": self.resolve(self.content.stopwords),
            "content.hashtag_categories": self.resolve(self.content.hashtag_categories),
            "sentiment.lexicon": self.resolve(self.sentiment.lexicon),
            "sentiment.emoji_table": self.resolve(self.sentiment.emoji_table),
        }

    def input_paths(self) -> List[Path]:
        return [self.resolve(p) for p in self.ingest.primary_inputs + self.ingest.compensation_inputs]

    def validate(self) -> bool:
        """
        Fail fast on anything that would only break mid-run.

        Raises:
            FileNotFoundError: referenced input or resource file missing
            ValueError: inconsistent settings, or a resource file that does not parse
        """
        if not self.ingest.primary_inputs and not self.ingest.compensation_inputs:
            raise ValueError("no input files configured (ingest.primary_inputs)")
        for path in self.input_paths():
            if not path.exists():
                raise FileNotFoundError(f"Input file not found: {path}")

        optional = {"geo.boundaries", "geo.county_population", "content.hashtag_categories"}
        for key, path in self.resource_paths().items():
            if path is None:
                if key in optional:
                    continue
                raise ValueError(f"resource path '{key}' is not set")
            if not path.exists():
                raise FileNotFoundError(f"Resource file not found ({key}): {path}")

        if self.ingest.window_end < self.ingest.window_start:
            raise ValueError(
                f"collection window ends before it starts: "
                f"{self.ingest.window_start} -> {self.ingest.window_end}"
            )
        phases = sorted(self.temporal.phases, key=lambda p: p.start)
        for previous, current in zip(phases, phases[1:]):
            if (current.start - previous.end).days != 1:
                raise ValueError(f"phases {previous.id} and {current.id} are not contiguous")
        if not (0.0 < self.cleaning.coverage <= 1.0):
            raise ValueError(f"cleaning.coverage must be in (0, 1], got {self.cleaning.coverage}")
        if self.content.weighting not in ("bow", "tfidf_scaled"):
            raise ValueError(f"content.weighting must be 'bow' or 'tfidf_scaled', got {self.content.weighting}")
        if self.content.unique_by not in ("id", "text"):
            raise ValueError(f"content.unique_by must be 'id' or 'text', got {self.content.unique_by}")
        if any(k < 2 for k in self.content.k_candidates):
            raise ValueError("content.k_candidates must all be >= 2")
        if self.sentiment.weighting not in ("occurrence", "tweet"):
            raise ValueError(f"sentiment.weighting must be 'occurrence' or 'tweet', got {self.sentiment.weighting}")
        if self.geo.county_mode not in ("polygon", "remote"):
            raise ValueError(f"geo.county_mode must be 'polygon' or 'remote', got {self.geo.county_mode}")
        for key, states in (("execution.states", self.execution.states),
                            ("sentiment.event_states", self.sentiment.event_states),
                            ("sentiment.reopen_states", self.sentiment.reopen_states)):
            for state in states:
                try:
                    normalize_state(state)
                except ValueError as e:
                    raise ValueError(f"{key}: {e}") from e
        self._parse_resources()
        return True

    def _parse_resources(self) -> None:
        """Run every resource loader once; a malformed table becomes ValueError naming its key."""
        loaders = {
            "temporal.clock_rules": load_clock_rules,
            "engagement.calendar": load_event_calendar,
            "geo.population": load_population,
            "geo.cases": load_cases,
            "geo.boundaries": load_boundaries,
            "geo.county_population": load_county_population,
            "content.stopwords": load_stopwords,
            "content.hashtag_categories": load_hashtag_categories,
            "sentiment.lexicon": load_lexicon,
            "sentiment.emoji_table": load_emoji_table,
        }
        for key, path in self.resource_paths().items():
            if path is None:
                continue
            try:
                loaders[key](path)
            except (ValueError, KeyError, TypeError) as e:
                raise ValueError(f"resource '{key}' ({path}) does not parse: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("base_dir")
        data["geo"].pop("geocoder_contact")
        return data

    def hashed_dict(self) -> Dict[str, Any]:
        """to_dict without the settings that cannot change an artifact (out dir, workers, quiet)."""
        data = self.to_dict()
        for key in ("out_dir", "workers", "quiet"):
            data["execution"].pop(key)
        return data

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON dump (sorted keys, dates as ISO strings)."""
        canonical = json.dumps(self.hashed_dict(), sort_keys=True, default=str, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ============================================================================
# LOADING
# ============================================================================

_DATE_FIELDS = {"window_start", "window_end", "added_keywords_effective", "snapshot_date"}


def _build_section(cls, values: Optional[Dict[str, Any]]):
    values = dict(values or {})
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"Unknown key(s) in section for {cls.__name__}: {sorted(unknown)}")

    for key in list(values):
        if key in _DATE_FIELDS:
            values[key] = _to_date(values[key])
    if cls is TemporalConfig:
        if "phases" in values:
            values["phases"] = [
                PhaseConfig(str(p["id"]), _to_date(p["start"]), _to_date(p["end"]))
                for p in values["phases"]
            ]
        if "excluded_dates" in values:
            values["excluded_dates"] = [_to_date(d) for d in values["excluded_dates"] or []]
    return cls(**values)


def load_config(config_file: Optional[str] = None, overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> RunConfig:
    """
    Load a RunConfig from YAML.

    Args:
        config_file: YAML path (None -> all defaults, paths relative to cwd)
        overrides: {section: {key: value}} applied after YAML (CLI flags)

    Raises:
        FileNotFoundError: config file missing
        ValueError: unknown section or key
    """
    load_dotenv()

    raw: Dict[str, Any] = {}
    base_dir = "."
    if config_file is not None:
        path = Path(config_file)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {config_file}")
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
        base_dir = str(path.parent)

    for section, values in (overrides or {}).items():
        raw.setdefault(section, {})
        raw[section] = dict(raw[section] or {})
        raw[section].update({k: v for k, v in values.items() if v is not None})

    sections = {
        "ingest": IngestConfig,
        "cleaning": CleaningConfig,
        "temporal": TemporalConfig,
        "engagement": EngagementConfig,
        "geo": GeoConfig,
        "content": ContentConfig,
        "sentiment": SentimentConfig,
        "stats": StatsConfig,
        "execution": ExecutionConfig,
    }
    unknown = set(raw) - set(sections)
    if unknown:
        raise ValueError(f"Unknown config section(s): {sorted(unknown)}")

    config = RunConfig(
        base_dir=base_dir,
        **{name: _build_section(cls, raw.get(name)) for name, cls in sections.items()},
    )

    if config.geo.geocoder_contact is None:
        config.geo.geocoder_contact = os.environ.get(GEOCODER_CONTACT_ENV)
    return config
