"""
Temporal normalization

- UTC -> state-local time with the shipped clock rules (date-level DST switch)
- phase segmentation of the collection window
- daily series and 7x24 hour-of-week matrices (mergeable by addition)
- weekend-vs-workday hourly gap table
"""

from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import pytz

from core.models import HourWeekMatrix, Phase, StateClockRule, BUSINESS_HOURS


ALL_STATES = "ALL"


@dataclass(frozen=True)
class LocalTime:
    timestamp: datetime  # tz-aware, fixed offset
    date: date
    hour: int
    weekday: int  # 1=Monday ... 7=Sunday
    offset: int


def _rule_for(state: str, rules: Dict[str, StateClockRule]) -> StateClockRule:
    rule = rules.get(state) if state is not None else None
    if rule is None:
        raise ValueError(f"unknown state: {state}")
    return rule


def dst_applies(rule: StateClockRule, standard_date: date) -> bool:
    if not rule.observes_dst or rule.dst_start is None:
        return False
    if standard_date < rule.dst_start:
        return False
    return rule.dst_end is None or standard_date < rule.dst_end


def to_local(created_at_utc: datetime, state: str, rules: Dict[str, StateClockRule]) -> LocalTime:
    """
    Local wall time for a UTC timestamp in a state.

    local = UTC + std_offset, plus one hour when DST applies to the
    standard-time local date.
    """
    rule = _rule_for(state, rules)
    if created_at_utc.tzinfo is None:
        created_at_utc = pytz.utc.localize(created_at_utc)
    standard = created_at_utc.astimezone(pytz.FixedOffset(rule.std_offset * 60))
    offset = rule.std_offset + (1 if dst_applies(rule, standard.date()) else 0)
    local = created_at_utc.astimezone(pytz.FixedOffset(offset * 60))
    return LocalTime(
        timestamp=local,
        date=local.date(),
        hour=local.hour,
        weekday=local.isoweekday(),
        offset=offset,
    )


def localize_frame(frame: pd.DataFrame, rules: Dict[str, StateClockRule]) -> pd.DataFrame:
    """
    Vectorized to_local over a record frame (needs created_at_utc and state).

    Adds: utc_offset, local_time (naive wall time), local_date, hour, weekday.
    """
    out = frame.copy()
    if out.empty:
        for col in ("utc_offset", "hour", "weekday"):
            out[col] = pd.Series(dtype="int64")
        out["local_time"] = pd.Series(dtype="datetime64[ns]")
        out["local_date"] = pd.Series(dtype="object")
        return out

    unknown = sorted(set(out["state"].dropna()) - set(rules))
    if unknown or out["state"].isna().any():
        raise ValueError(f"unknown state: {unknown[0] if unknown else None}")

    utc_naive = pd.to_datetime(out["created_at_utc"], utc=True).dt.tz_localize(None)
    std_offset = out["state"].map(lambda s: rules[s].std_offset).astype("int64")
    standard = utc_naive + pd.to_timedelta(std_offset, unit="h")
    standard_date = standard.dt.date

    dst = [dst_applies(rules[s], d) for s, d in zip(out["state"], standard_date)]
    offset = std_offset + np.asarray(dst, dtype="int64")

    local = utc_naive + pd.to_timedelta(offset, unit="h")
    out["utc_offset"] = offset
    out["local_time"] = local
    out["local_date"] = local.dt.date
    out["hour"] = local.dt.hour.astype("int64")
    out["weekday"] = (local.dt.dayofweek + 1).astype("int64")
    return out


# ============================================================================
# PHASES
# ============================================================================

def assign_phase(local_date: date, phases: Sequence[Phase]) -> Phase:
    for phase in phases:
        if phase.contains(local_date):
            return phase
    raise ValueError(f"date {local_date} is outside every phase")


def phase_column(dates: Iterable[date], phases: Sequence[Phase]) -> List[str]:
    return [assign_phase(d, phases).id for d in dates]


# ============================================================================
# HISTOGRAMS
# ============================================================================

def matrix_from_frame(frame: pd.DataFrame) -> HourWeekMatrix:
    """Accumulate weekday/hour columns into a 7x24 matrix."""
    counts = np.zeros((7, 24), dtype=np.int64)
    if len(frame):
        np.add.at(counts, (frame["weekday"].to_numpy() - 1, frame["hour"].to_numpy()), 1)
    return HourWeekMatrix(counts)


def in_window(frame: pd.DataFrame, window: Tuple[date, date], excluded_dates: Iterable[date] = ()) -> pd.DataFrame:
    start, end = window
    if end < start:
        raise ValueError(f"empty window: {start} -> {end}")
    if frame.empty:
        return frame
    mask = (frame["local_date"] >= start) & (frame["local_date"] <= end)
    excluded = set(excluded_dates)
    if excluded:
        mask &= ~frame["local_date"].isin(excluded)
    return frame[mask]


def build_histograms(frame: pd.DataFrame, group_by: str = "all", window: Optional[Tuple[date, date]] = None,
                     excluded_dates: Iterable[date] = ()) -> Tuple[pd.DataFrame, Dict[str, HourWeekMatrix]]:
    """
    Daily series and hour-of-week matrices over a window.

    Args:
        frame: localized record frame
        group_by: 'all' (one matrix keyed ALL) or 'state' (one matrix per state)
        window: local date range (inclusive); None -> the frame's own range

    Returns:
        (daily DataFrame date,state,count ; {key: HourWeekMatrix})
    """
    if group_by not in ("all", "state"):
        raise ValueError(f"group_by must be 'all' or 'state', got {group_by}")
    if window is not None:
        frame = in_window(frame, window, excluded_dates)
    elif excluded_dates:
        frame = frame[~frame["local_date"].isin(set(excluded_dates))]

    if frame.empty:
        daily = pd.DataFrame(columns=["date", "state", "count"])
        return daily, ({ALL_STATES: HourWeekMatrix()} if group_by == "all" else {})

    keys = frame["state"] if group_by == "state" else pd.Series(ALL_STATES, index=frame.index)
    daily = (frame.assign(key=keys)
             .groupby(["local_date", "key"]).size()
             .reset_index(name="count")
             .rename(columns={"local_date": "date", "key": "state"})
             .sort_values(["date", "state"])
             .reset_index(drop=True))
    daily["date"] = daily["date"].map(lambda d: d.isoformat())

    matrices = {key: matrix_from_frame(group) for key, group in frame.groupby(keys, sort=True)}
    return daily, matrices


def phase_matrices(frame: pd.DataFrame, phases: Sequence[Phase],
                   excluded_dates: Iterable[date] = ()) -> Dict[str, HourWeekMatrix]:
    """National hour-of-week matrix for each phase."""
    result = {}
    for phase in phases:
        _, matrices = build_histograms(frame, "all", (phase.start, phase.end), excluded_dates)
        result[phase.id] = matrices[ALL_STATES]
    return result


def matrices_frame(matrices: Dict[str, HourWeekMatrix]) -> pd.DataFrame:
    """Matrix CSV layout: state,weekday,hour,count."""
    parts = []
    for key in sorted(matrices):
        long = matrices[key].to_frame()
        long.insert(0, "state", key)
        parts.append(long)
    if not parts:
        return pd.DataFrame(columns=["state", "weekday", "hour", "count"])
    return pd.concat(parts, ignore_index=True)


def workweek_gap_table(matrix: HourWeekMatrix) -> pd.DataFrame:
    """
    Per-hour weekend frequency minus workday frequency.

    Both profiles are normalized by their own totals, so gaps sum to 0.
    Raises ValueError when either total is zero.
    """
    if matrix.workday_total == 0 or matrix.weekend_total == 0:
        raise ValueError("workweek gap needs non-zero workday and weekend totals")
    weekend = matrix.counts[5:7].sum(axis=0) / matrix.weekend_total
    workday = matrix.counts[0:5].sum(axis=0) / matrix.workday_total
    gap = weekend - workday
    return pd.DataFrame({
        "hour": np.arange(24),
        "weekend_freq": weekend,
        "workday_freq": workday,
        "gap": gap,
        "color": np.where(gap >= 0, "green", "red"),
        "business_hour": [h in BUSINESS_HOURS for h in range(24)],
    })


# ============================================================================
# VOLUME TABLES
# ============================================================================

def monthly_state_counts(frame: pd.DataFrame) -> pd.DataFrame:
    """month (YYYY-MM), state, count."""
    if frame.empty:
        return pd.DataFrame(columns=["month", "state", "count"])
    months = frame["local_date"].map(lambda d: f"{d.year:04d}-{d.month:02d}")
    return (frame.assign(month=months)
            .groupby(["month", "state"]).size()
            .reset_index(name="count")
            .sort_values(["month", "state"])
            .reset_index(drop=True))


def top_states_by_volume(daily: pd.DataFrame, n: int = 10) -> List[str]:
    """States with the largest total volume (ties alphabetical)."""
    if daily.empty:
        return []
    totals = daily.groupby("state")["count"].sum().reset_index()
    totals = totals.sort_values(["count", "state"], ascending=[False, True])
    return list(totals["state"].head(n))


def daily_pivot(daily: pd.DataFrame, window: Tuple[date, date]) -> pd.DataFrame:
    """Wide daily table (index date over the full window, one column per state, zeros filled)."""
    days = [(window[0] + timedelta(days=i)).isoformat() for i in range((window[1] - window[0]).days + 1)]
    if daily.empty:
        return pd.DataFrame(index=pd.Index(days, name="date"))
    wide = daily.pivot_table(index="date", columns="state", values="count", aggfunc="sum", fill_value=0)
    return wide.reindex(days, fill_value=0).sort_index(axis=1)
