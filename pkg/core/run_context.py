"""
Run context shared by all steps of one invocation

Holds the configuration, the console, lazily loaded resource tables and the
memoized corpus stages (ingest -> clean -> localized frame), so `all` parses
the input once.
"""

from functools import cached_property
from typing import Dict, List, Optional, Tuple

import pandas as pd

from analysis.geospatial import CountyResolver, load_boundaries
from analysis.sentiment import (
    build_event_specs, default_event_states, emoji_frame, event_sentiment, load_emoji_table,
)
from analysis.temporal import localize_frame
from core.config import RunConfig
from core.models import EventCalendar, Phase, StateStats, TweetRecord, records_to_frame
from core.states import load_clock_rules
from data.corpus_cleaner import BotDetection, detect_bots, remove_bot_tweets
from data.resources import load_cases, load_event_calendar, load_population, state_statistics
from data.tweet_loader import IngestResult, KeywordFilter, load_corpus


class Console:
    """Console output in the pipeline's house style; quiet mode prints nothing."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def _print(self, text: str = ""):
        if not self.quiet:
            print(text)

    def banner(self, title: str, icon: str = "📊"):
        self._print("\n" + "=" * 70)
        self._print(f"{icon} {title}")
        self._print("=" * 70 + "\n")

    def step(self, number: int, message: str):
        self._print(f"[{number}] {message}")

    def ok(self, message: str):
        self._print(f"   ✅ {message}")

    def warn(self, message: str):
        self._print(f"   ⚠️  {message}")

    def stat(self, message: str):
        self._print(f"   📊 {message}")

    def info(self, message: str):
        self._print(f"   {message}")


class RunContext:
    """
    Usage:
        context = RunContext(load_config('config_geotweets.yaml'))
        frame = context.frame          # cleaned, localized records
    """

    def __init__(self, config: RunConfig, console: Optional[Console] = None):
        self.config = config
        self.console = console or Console(config.execution.quiet)

    # ------------------------------------------------------------------
    # Resources
    # ------------------------------------------------------------------

    def path(self, key: str):
        return self.config.resource_paths()[key]

    @cached_property
    def clock_rules(self):
        return load_clock_rules(self.path("temporal.clock_rules"))

    @cached_property
    def phases(self) -> List[Phase]:
        return [Phase(p.id, p.start, p.end) for p in sorted(self.config.temporal.phases, key=lambda p: p.start)]

    @cached_property
    def calendar(self) -> EventCalendar:
        return load_event_calendar(self.path("engagement.calendar"))

    @cached_property
    def population(self) -> Dict[str, int]:
        return load_population(self.path("geo.population"))

    @cached_property
    def cases(self) -> pd.DataFrame:
        return load_cases(self.path("geo.cases"))

    @cached_property
    def state_stats(self) -> Dict[str, StateStats]:
        snapshot = self.config.geo.snapshot_date or self.config.ingest.window_end
        return state_statistics(self.population, self.cases, snapshot)

    @cached_property
    def boundaries(self):
        path = self.path("geo.boundaries")
        if path is None:
            return None
        return load_boundaries(path)

    @cached_property
    def county_resolver(self):
        """CountyResolver for the configured mode, or None in polygon mode without boundaries."""
        geo = self.config.geo
        if geo.county_mode == "polygon" and self.boundaries is None:
            return None
        return CountyResolver(
            boundaries=self.boundaries,
            mode=geo.county_mode,
            county_field=geo.county_field,
            state_field=geo.state_field,
            cache_path=str(self.config.resolve(geo.cache_path)) if geo.cache_path else None,
            contact=geo.geocoder_contact,
            domain=geo.geocoder_domain,
            scheme=geo.geocoder_scheme,
            min_delay_seconds=geo.min_delay_seconds,
            max_retries=geo.max_retries,
        )

    # ------------------------------------------------------------------
    # Corpus stages
    # ------------------------------------------------------------------

    @cached_property
    def ingest(self) -> IngestResult:
        """
        IngestResult of the configured inputs.

        Raises:
            ValueError: "empty corpus" when nothing survives ingest
        """
        ingest = self.config.ingest
        keyword_filter = KeywordFilter.from_lists(
            ingest.base_keywords, ingest.added_keywords, ingest.added_keywords_effective)

        point_resolver = None
        if ingest.resolve_state_from_points:
            if self.county_resolver is None:
                self.console.warn("geo.boundaries not set: states are not resolved from GPS points")
            else:
                point_resolver = self.county_resolver.state_of

        result = load_corpus(
            primary_paths=[str(self.config.resolve(p)) for p in ingest.primary_inputs],
            compensation_paths=[str(self.config.resolve(p)) for p in ingest.compensation_inputs],
            keyword_filter=keyword_filter,
            window=(ingest.window_start, ingest.window_end),
            point_resolver=point_resolver,
            workers=self.config.execution.workers,
        )
        if not result.records:
            raise ValueError("empty corpus")
        return result

    @cached_property
    def cleaning(self) -> Tuple[List[TweetRecord], BotDetection, Dict[str, int]]:
        """(kept records, bot detection, removed records per rule)."""
        c = self.config.cleaning
        detection = detect_bots(self.ingest.activities.values(), cap=c.cap, floor=c.floor,
                                coverage=c.coverage, top=c.top_intervals)
        kept, removed = remove_bot_tweets(self.ingest.records, detection)
        if not kept:
            raise ValueError("empty corpus")
        return kept, detection, removed

    @property
    def records(self) -> List[TweetRecord]:
        """Cleaned records restricted to execution.states (when set)."""
        kept = self.cleaning[0]
        states = set(self.config.execution.states)
        if states:
            kept = [r for r in kept if r.state in states]
        return kept

    @cached_property
    def frame(self) -> pd.DataFrame:
        """Cleaned records as a localized frame (local_date, hour, weekday added)."""
        frame = records_to_frame(self.records)
        if frame.empty:
            raise ValueError("empty corpus")
        return localize_frame(frame, self.clock_rules)

    @cached_property
    def emoji_table(self):
        return load_emoji_table(self.path("sentiment.emoji_table"))

    @cached_property
    def emoji_counts(self) -> pd.DataFrame:
        """Localized frame with per-tweet emoji category counts."""
        return emoji_frame(self.frame, self.emoji_table)

    @cached_property
    def event_sentiment(self) -> Tuple[pd.DataFrame, pd.DataFrame, List[str]]:
        s = self.config.sentiment
        specs = build_event_specs(self.cases, self.calendar, s.event_window_days)
        states_for = default_event_states(s.event_states, s.reopen_states)
        return event_sentiment(self.emoji_counts, specs, states_for, s.weighting)
