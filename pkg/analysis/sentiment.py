"""
Sentiment analysis

- lexicon polarity/subjectivity scoring (average over matched words) and the
  positive/negative ratio grid over (subjectivity, polarity) thresholds
- facial emoji classification (positive / neutral / negative) from a
  codepoint table, matched with the `emoji` package (longest sequence first)
- daily emoji sentiment series and event-window sentiment across states

Emoji shares are occurrence-weighted by default: every emoji counts once.
Tweet-weighted mode gives every emoji-bearing tweet one vote split over its
categories in proportion to its own emoji counts.
"""

from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import emoji
import numpy as np
import pandas as pd

from analysis.content_mining import TOKENIZER
from analysis.temporal import ALL_STATES
from core.models import ANCHOR_LOCKDOWN, ANCHOR_REOPEN, EventCalendar


POSITIVE = "positive"
NEUTRAL = "neutral"
NEGATIVE = "negative"
CATEGORIES = (POSITIVE, NEUTRAL, NEGATIVE)

VARIATION_SELECTOR = "\ufe0f"

CASE_THRESHOLDS = (("first_case", 1), ("case_100", 100), ("case_1000", 1000))
DEATH_THRESHOLDS = (("first_death", 1), ("death_100", 100), ("death_1000", 1000))
EVENT_NAMES = tuple(name for name, _ in CASE_THRESHOLDS + DEATH_THRESHOLDS) + (ANCHOR_LOCKDOWN, ANCHOR_REOPEN)


# ============================================================================
# LEXICON
# ============================================================================

@dataclass
class SentimentLexicon:
    """word -> (polarity in [-1, 1], subjectivity in [0, 1]); lookup is case-insensitive."""
    entries: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        normalized = {}
        for word, (polarity, subjectivity) in self.entries.items():
            if not -1.0 <= polarity <= 1.0:
                raise ValueError(f"polarity of '{word}' out of [-1, 1]: {polarity}")
            if not 0.0 <= subjectivity <= 1.0:
                raise ValueError(f"subjectivity of '{word}' out of [0, 1]: {subjectivity}")
            normalized[word.lower()] = (float(polarity), float(subjectivity))
        self.entries = normalized

    def get(self, word: str) -> Optional[Tuple[float, float]]:
        return self.entries.get(word.lower())

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path) -> SentimentLexicon:
    """CSV word,polarity,subjectivity."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Sentiment lexicon not found: {path}")
    table = pd.read_csv(path, dtype={"word": str}, keep_default_na=False, comment="#")
    for col in ("word", "polarity", "subjectivity"):
        if col not in table.columns:
            raise ValueError(f"{path}: missing column '{col}'")

    entries = {}
    for row, (word, polarity, subjectivity) in enumerate(
            zip(table["word"], table["polarity"], table["subjectivity"]), start=2):
        word = word.strip().lower()
        if not word:
            continue
        if word in entries:
            raise ValueError(f"{path}, row {row}: duplicate word '{word}'")
        try:
            entries[word] = (float(polarity), float(subjectivity))
        except ValueError:
            raise ValueError(f"{path}, row {row}: scores must be numbers")
    try:
        return SentimentLexicon(entries)
    except ValueError as e:
        raise ValueError(f"{path}: {e}")


def score_text(text: str, lexicon: SentimentLexicon) -> Tuple[float, float]:
    """(polarity, subjectivity) averaged over matched words; (0, 0) without matches."""
    matched = [lexicon.get(t) for t in TOKENIZER.tokenize((text or "").lower())]
    matched = [m for m in matched if m is not None]
    if not matched:
        return 0.0, 0.0
    polarity = sum(m[0] for m in matched) / len(matched)
    subjectivity = sum(m[1] for m in matched) / len(matched)
    return polarity, subjectivity


def polarity_ratio_grid(texts: Iterable[str], lexicon: SentimentLexicon,
                        subjectivity_thresholds: Sequence[float],
                        polarity_thresholds: Sequence[float]) -> pd.DataFrame:
    """
    For each (s, p): candidates have subjectivity > s; ratio = #(polarity > p) / #(polarity < -p).

    ratio is inf with zero negatives (and positives > 0), NaN when both are zero.

    Returns:
        DataFrame s, p, candidates, positive, negative, ratio
    """
    for s in subjectivity_thresholds:
        if not 0.0 <= s < 1.0:
            raise ValueError(f"subjectivity threshold out of [0, 1): {s}")
    for p in polarity_thresholds:
        if not 0.0 <= p < 1.0:
            raise ValueError(f"polarity threshold out of [0, 1): {p}")

    scores = np.array([score_text(t, lexicon) for t in texts], dtype=float).reshape(-1, 2)
    polarity, subjectivity = scores[:, 0], scores[:, 1]

    rows = []
    for s in subjectivity_thresholds:
        candidates = subjectivity > s
        for p in polarity_thresholds:
            positive = int(np.sum(candidates & (polarity > p)))
            negative = int(np.sum(candidates & (polarity < -p)))
            if negative:
                ratio = positive / negative
            else:
                ratio = np.inf if positive else np.nan
            rows.append((s, p, int(candidates.sum()), positive, negative, ratio))
    return pd.DataFrame(rows, columns=["s", "p", "candidates", "positive", "negative", "ratio"])


# ============================================================================
# EMOJI
# ============================================================================

def _normalize_emoji(sequence: str) -> str:
    return sequence.replace(VARIATION_SELECTOR, "")


def _parse_codepoints(value: str) -> str:
    parts = value.replace("U+", "").replace("u+", "").replace("-", " ").split()
    return "".join(chr(int(part, 16)) for part in parts)


@dataclass
class EmojiCategoryTable:
    """Emoji sequence (variation selectors removed) -> category."""
    entries: Dict[str, str] = field(default_factory=dict)

    def category(self, sequence: str) -> Optional[str]:
        return self.entries.get(_normalize_emoji(sequence))

    def members(self, category: str) -> List[str]:
        return sorted(e for e, c in self.entries.items() if c == category)


def load_emoji_table(path) -> EmojiCategoryTable:
    """
    CSV codepoint,category (codepoint in hex, space separated for sequences).

    Raises:
        ValueError: unknown category, or one emoji listed under two categories
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Emoji category table not found: {path}")
    table = pd.read_csv(path, dtype=str, keep_default_na=False, comment="#")
    for col in ("codepoint", "category"):
        if col not in table.columns:
            raise ValueError(f"{path}: missing column '{col}'")

    entries: Dict[str, str] = {}
    for row, (codepoint, category) in enumerate(zip(table["codepoint"], table["category"]), start=2):
        category = category.strip().lower()
        if category not in CATEGORIES:
            raise ValueError(f"{path}, row {row}: unknown category '{category}'")
        try:
            sequence = _normalize_emoji(_parse_codepoints(codepoint))
        except ValueError:
            raise ValueError(f"{path}, row {row}: bad codepoint '{codepoint}'")
        previous = entries.get(sequence)
        if previous is not None and previous != category:
            raise ValueError(f"{path}, row {row}: {codepoint} listed as both {previous} and {category}")
        entries[sequence] = category
    return EmojiCategoryTable(entries)


def emoji_occurrences(text: str, table: EmojiCategoryTable) -> List[Tuple[str, str]]:
    """(emoji, category) for every classified emoji in order; other emojis are skipped."""
    found = []
    for match in emoji.emoji_list(text or ""):
        sequence = _normalize_emoji(match["emoji"])
        category = table.entries.get(sequence)
        if category is not None:
            found.append((sequence, category))
    return found


def classify_emojis(text: str, table: EmojiCategoryTable) -> Dict[str, int]:
    counts = Counter(category for _, category in emoji_occurrences(text, table))
    return {c: counts.get(c, 0) for c in CATEGORIES}


def emoji_frame(frame: pd.DataFrame, table: EmojiCategoryTable) -> pd.DataFrame:
    """Adds per-tweet positive/neutral/negative counts and n_emojis."""
    out = frame.copy()
    counts = [classify_emojis(t, table) for t in out["text"]] if len(out) else []
    for category in CATEGORIES:
        out[category] = np.array([c[category] for c in counts], dtype=np.int64)
    out["n_emojis"] = out[list(CATEGORIES)].sum(axis=1).astype(np.int64) if len(out) else np.array([], dtype=np.int64)
    return out


def category_shares(counts: pd.DataFrame, weighting: str = "occurrence") -> Optional[Dict[str, float]]:
    """
    Percent share per category over rows of per-tweet counts; None without emojis.
    """
    if weighting not in ("occurrence", "tweet"):
        raise ValueError(f"weighting must be 'occurrence' or 'tweet', got {weighting}")
    with_emojis = counts[counts["n_emojis"] > 0] if len(counts) else counts
    if with_emojis.empty:
        return None
    values = with_emojis[list(CATEGORIES)].to_numpy(dtype=float)
    if weighting == "tweet":
        values = values / values.sum(axis=1, keepdims=True)
    totals = values.sum(axis=0)
    shares = totals * 100.0 / totals.sum()
    return dict(zip(CATEGORIES, shares.tolist()))


def daily_sentiment_series(frame: pd.DataFrame, table: Optional[EmojiCategoryTable] = None,
                           group_by: str = "all", weighting: str = "occurrence") -> pd.DataFrame:
    """
    Per local date (and state): category shares in percent.

    frame must be localized; when `table` is given emoji counts are computed,
    otherwise frame must already carry them (emoji_frame). Days with tweets but
    no emojis keep a row with empty shares.

    Returns:
        DataFrame date, state, positive, neutral, negative, n_emojis
    """
    if group_by not in ("all", "state"):
        raise ValueError(f"group_by must be 'all' or 'state', got {group_by}")
    counts = emoji_frame(frame, table) if table is not None else frame
    columns = ["date", "state"] + list(CATEGORIES) + ["n_emojis"]
    if counts.empty:
        return pd.DataFrame(columns=columns)

    keys = ["local_date"] if group_by == "all" else ["local_date", "state"]
    rows = []
    for key, group in counts.groupby(keys, sort=True):
        key = key if isinstance(key, tuple) else (key,)
        day = key[0]
        state = ALL_STATES if group_by == "all" else key[1]
        shares = category_shares(group, weighting)
        values = [np.nan] * 3 if shares is None else [shares[c] for c in CATEGORIES]
        rows.append([day.isoformat(), state] + values + [int(group["n_emojis"].sum())])
    return pd.DataFrame(rows, columns=columns)


def emoji_usage(texts: Iterable[str], table: EmojiCategoryTable, top: int = 10) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Top emojis per category and category totals.

    Returns:
        (category, rank, emoji, codepoint, count ; category, count, percent)
    """
    counts: Counter = Counter()
    for text in texts:
        counts.update(emoji_occurrences(text, table))

    rows = []
    for category in CATEGORIES:
        ranked = sorted(((e, n) for (e, c), n in counts.items() if c == category),
                        key=lambda item: (-item[1], item[0]))
        for rank, (sequence, n) in enumerate(ranked[:top], start=1):
            codepoint = " ".join(f"{ord(ch):X}" for ch in sequence)
            rows.append((category, rank, sequence, codepoint, n))
    usage = pd.DataFrame(rows, columns=["category", "rank", "emoji", "codepoint", "count"])

    totals = Counter()
    for (_, category), n in counts.items():
        totals[category] += n
    grand = sum(totals.values())
    totals_frame = pd.DataFrame({
        "category": list(CATEGORIES),
        "count": [totals.get(c, 0) for c in CATEGORIES],
    })
    totals_frame["percent"] = totals_frame["count"] * 100.0 / grand if grand else np.nan
    return usage, totals_frame


# ============================================================================
# EVENTS
# ============================================================================

@dataclass
class EventSpec:
    name: str
    dates: Dict[str, date] = field(default_factory=dict)
    window_days: int = 7

    def __post_init__(self):
        if self.name not in EVENT_NAMES:
            raise ValueError(f"unknown event '{self.name}'")
        if self.window_days < 1:
            raise ValueError(f"window_days must be >= 1, got {self.window_days}")

    def window(self, state: str) -> Optional[Tuple[date, date]]:
        """[event_date, event_date + window_days) as inclusive bounds."""
        start = self.dates.get(state)
        if start is None:
            return None
        return start, start + timedelta(days=self.window_days - 1)


def _first_crossing(dates: Sequence[date], values: Sequence[int], threshold: int) -> Optional[date]:
    """Date of the first row at or above `threshold`, gaps between rows ignored."""
    for day, value in zip(dates, values):
        if value >= threshold:
            return day
    return None


def derive_case_events(cases: pd.DataFrame) -> Dict[str, Dict[str, date]]:
    """
    First date each state's cumulative cases/deaths reach 1, 100 and 1000.

    cases: state, date, cum_cases, cum_deaths (one row per state and date)

    Raises:
        ValueError: a cumulative series decreases
    """
    events: Dict[str, Dict[str, date]] = {name: {} for name, _ in CASE_THRESHOLDS + DEATH_THRESHOLDS}
    if cases.empty:
        return events
    for state, group in cases.sort_values(["state", "date"]).groupby("state", sort=True):
        dates = list(group["date"])
        for column, thresholds in (("cum_cases", CASE_THRESHOLDS), ("cum_deaths", DEATH_THRESHOLDS)):
            values = group[column].to_numpy()
            drops = np.nonzero(np.diff(values) < 0)[0]
            if drops.size:
                raise ValueError(f"cumulative {column} for {state} decreases on {dates[drops[0] + 1]}")
            for name, threshold in thresholds:
                crossed = _first_crossing(dates, values, threshold)
                if crossed is not None:
                    events[name][state] = crossed
    return events


def build_event_specs(cases: pd.DataFrame, calendar: EventCalendar, window_days: int = 7) -> List[EventSpec]:
    """All eight events: case/death crossings plus lockdown and reopen from the calendar."""
    derived = derive_case_events(cases)
    specs = [EventSpec(name, derived[name], window_days) for name, _ in CASE_THRESHOLDS + DEATH_THRESHOLDS]
    specs.append(EventSpec(ANCHOR_LOCKDOWN, dict(calendar.lockdown), window_days))
    specs.append(EventSpec(ANCHOR_REOPEN, dict(calendar.reopen), window_days))
    return specs


def event_sentiment(counts: pd.DataFrame, events: Sequence[EventSpec], states_for: Dict[str, Sequence[str]],
                    weighting: str = "occurrence") -> Tuple[pd.DataFrame, pd.DataFrame, List[str]]:
    """
    Category shares per (event, state) in the event window, then cross-state mean
    and population std per category.

    Args:
        counts: localized frame with per-tweet emoji counts (emoji_frame)
        events: event specs
        states_for: event name -> states to aggregate

    Returns:
        (summary event, category, mean, std, n_states ;
         shares event, state, positive, neutral, negative, n_emojis ; notices)
    """
    summary_rows, share_rows, notices = [], [], []
    for spec in events:
        per_state = []
        for state in states_for.get(spec.name, []):
            window = spec.window(state)
            if window is None:
                notices.append(f"{spec.name}: {state} has no event date, excluded")
                continue
            selected = counts[(counts["state"] == state)
                              & (counts["local_date"] >= window[0])
                              & (counts["local_date"] <= window[1])] if len(counts) else counts
            shares = category_shares(selected, weighting)
            if shares is None:
                notices.append(f"{spec.name}: {state} has no emojis in {window[0]}..{window[1]}, excluded")
                continue
            per_state.append(shares)
            share_rows.append([spec.name, state] + [shares[c] for c in CATEGORIES]
                              + [int(selected["n_emojis"].sum())])

        for category in CATEGORIES:
            values = np.array([s[category] for s in per_state], dtype=float)
            mean = float(values.mean()) if values.size else np.nan
            std = float(values.std(ddof=0)) if values.size else np.nan
            summary_rows.append((spec.name, category, mean, std, len(per_state)))

    summary = pd.DataFrame(summary_rows, columns=["event", "category", "mean", "std", "n_states"])
    shares = pd.DataFrame(share_rows, columns=["event", "state"] + list(CATEGORIES) + ["n_emojis"])
    return summary, shares, notices


def default_event_states(event_states: Sequence[str], reopen_states: Sequence[str]) -> Dict[str, List[str]]:
    """The reopen event uses its own state list, every other event the common one."""
    return {name: list(reopen_states if name == ANCHOR_REOPEN else event_states) for name in EVENT_NAMES}
