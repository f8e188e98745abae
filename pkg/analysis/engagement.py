"""
Work engagement indices

Hourly index, hour i (business hours 8..16):
    H(i) = [weekend_i / T_weekend] / [workday_i / T_workday] - 1

Daily index, weekday j (Mon..Fri), over business hours only:
    D(j) = [weekend_business / T_weekend] / [day_j_business / T_j] - 1

Arithmetic is exact (Fraction) then converted to float.
Undefined cells are None; -1.0 only when the weekend numerator is truly 0.
"""

from datetime import date, timedelta
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from core.models import (
    BUSINESS_HOURS, DAY_LABELS, WORKDAYS,
    EngagementReport, EventCalendar, HourWeekMatrix,
)
from analysis.temporal import in_window, matrix_from_frame


MORNING_HOURS = (8, 9, 10, 11, 12)
AFTERNOON_HOURS = (13, 14, 15, 16)


def hourly_engagement(matrix: HourWeekMatrix, hour: int) -> Optional[float]:
    """H(i), or None when the workday count at that hour (or a total) is zero."""
    weekend_total = matrix.weekend_total
    workday_total = matrix.workday_total
    workday = matrix.workday_hour(hour)
    if weekend_total == 0 or workday_total == 0 or workday == 0:
        return None
    weekend = matrix.weekend_hour(hour)
    return float(Fraction(weekend * workday_total, weekend_total * workday) - 1)


def daily_engagement(matrix: HourWeekMatrix, day: int) -> Optional[float]:
    """D(j) for j in 1..5, or None when day j has no business-hour tweets."""
    if day not in WORKDAYS:
        raise ValueError(f"daily engagement is defined for Monday..Friday (1..5), got {day}")
    weekend_total = matrix.weekend_total
    day_total = matrix.day_total(day)
    day_business = matrix.business_count(day)
    if weekend_total == 0 or day_total == 0 or day_business == 0:
        return None
    weekend_business = matrix.business_count(6) + matrix.business_count(7)
    return float(Fraction(weekend_business * day_total, weekend_total * day_business) - 1)


def engagement_report(matrix: HourWeekMatrix, state: str, window_start: date,
                      offset: int = 0, anchor: str = "") -> EngagementReport:
    return EngagementReport(
        state=state,
        window_start=window_start,
        window_end=window_start + timedelta(days=6),
        offset=offset,
        anchor=anchor,
        n_tweets=sum(matrix.business_count(d) for d in range(1, 8)),
        hourly={h: hourly_engagement(matrix, h) for h in BUSINESS_HOURS},
        daily={d: daily_engagement(matrix, d) for d in WORKDAYS},
    )


def window_bounds(anchor_date: date, offset: int) -> Tuple[date, date]:
    """Window k = [anchor + 7k, anchor + 7k + 6]."""
    start = anchor_date + timedelta(days=7 * offset)
    return start, start + timedelta(days=6)


def weekly_window_series(frame: pd.DataFrame, state: str, anchor: str, calendar: EventCalendar,
                         weeks_before: int = 5, weeks_after: int = 3) -> List[EngagementReport]:
    """
    One report per week offset in [-weeks_before, +weeks_after] around the state's anchor.

    frame must be localized. Returns [] when the calendar has no anchor date for
    the state (the caller records the notice).
    """
    anchor_date = calendar.anchor(state, anchor)
    if anchor_date is None:
        return []
    state_frame = frame[frame["state"] == state] if len(frame) else frame
    reports = []
    for offset in range(-weeks_before, weeks_after + 1):
        window = window_bounds(anchor_date, offset)
        matrix = matrix_from_frame(in_window(state_frame, window))
        reports.append(engagement_report(matrix, state, window[0], offset, anchor))
    return reports


def top_states_by_business_volume(frame: pd.DataFrame, calendar: EventCalendar, anchor: str,
                                  states: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    States ranked by business-hour tweet count in their own first anchor week.

    Ties are broken alphabetically. States without the anchor date are left out.
    """
    rows = []
    candidates = states if states is not None else sorted(set(frame["state"])) if len(frame) else []
    for state in candidates:
        anchor_date = calendar.anchor(state, anchor)
        if anchor_date is None:
            continue
        window = window_bounds(anchor_date, 0)
        matrix = matrix_from_frame(in_window(frame[frame["state"] == state], window))
        n = sum(matrix.business_count(d) for d in range(1, 8))
        rows.append((state, anchor_date.isoformat(), n))
    ranked = pd.DataFrame(rows, columns=["state", "date", "n_tweets"])
    return ranked.sort_values(["n_tweets", "state"], ascending=[False, True]).reset_index(drop=True)


# ============================================================================
# TABLES
# ============================================================================

def _mean_std(values: Sequence[Optional[float]]) -> Tuple[float, float]:
    defined = np.array([v for v in values if v is not None and not pd.isna(v)], dtype=float)
    if defined.size == 0:
        return np.nan, np.nan
    return float(defined.mean()), float(defined.std(ddof=0))


def reports_frame(reports: Sequence[EngagementReport], kind: str = "hourly") -> pd.DataFrame:
    """
    Engagement table: state, date, offset, n_tweets, one column per hour
    (8..16) or weekday (Mon..Fri), avg, std. Undefined cells are NaN.
    """
    if kind not in ("hourly", "daily"):
        raise ValueError(f"kind must be 'hourly' or 'daily', got {kind}")
    keys = list(BUSINESS_HOURS) if kind == "hourly" else list(WORKDAYS)
    labels = [str(h) for h in BUSINESS_HOURS] if kind == "hourly" else DAY_LABELS[:5]

    rows = []
    for report in reports:
        if kind == "hourly":
            values, avg, std = report.hourly, report.hourly_mean, report.hourly_std
        else:
            values, avg, std = report.daily, report.daily_mean, report.daily_std
        cells = [values.get(k) for k in keys]
        row = {
            "state": report.state,
            "anchor": report.anchor,
            "date": report.window_start.isoformat(),
            "offset": report.offset,
            "n_tweets": report.n_tweets,
        }
        row.update({label: (np.nan if v is None else v) for label, v in zip(labels, cells)})
        row.update({"avg": np.nan if avg is None else avg, "std": np.nan if std is None else std})
        rows.append(row)

    columns = ["state", "anchor", "date", "offset", "n_tweets"] + labels + ["avg", "std"]
    return pd.DataFrame(rows, columns=columns)


def summarize_reports(table: pd.DataFrame) -> pd.DataFrame:
    """Avg. and Std. rows across the states of an engagement table (per value column)."""
    value_columns = [c for c in table.columns if c not in ("state", "anchor", "date", "offset", "n_tweets")]
    rows = []
    for label in ("Avg.", "Std."):
        row = {"state": label}
        for col in value_columns:
            mean, std = _mean_std(list(table[col]))
            row[col] = mean if label == "Avg." else std
        rows.append(row)
    return pd.DataFrame(rows, columns=["state"] + value_columns)


def compare_anchor_weeks(lockdown_table: pd.DataFrame, reopen_table: pd.DataFrame) -> pd.DataFrame:
    """
    Cross-state averages for the first lockdown week versus the first reopen week,
    per value column plus morning (8-12) and afternoon (13-16) averages for hourly tables.
    """
    def first_week(table):
        return table[table["offset"] == 0] if len(table) else table

    lock = first_week(lockdown_table)
    reopen = first_week(reopen_table)
    value_columns = [c for c in lockdown_table.columns
                     if c not in ("state", "anchor", "date", "offset", "n_tweets", "avg", "std")]

    rows = []
    for col in value_columns:
        lock_mean, _ = _mean_std(list(lock[col]) if col in lock else [])
        reopen_mean, _ = _mean_std(list(reopen[col]) if col in reopen else [])
        rows.append((col, lock_mean, reopen_mean))

    if all(str(h) in value_columns for h in BUSINESS_HOURS):
        for name, hours in (("morning", MORNING_HOURS), ("afternoon", AFTERNOON_HOURS)):
            cols = [str(h) for h in hours]
            lock_mean, _ = _mean_std(lock[cols].to_numpy().ravel().tolist() if len(lock) else [])
            reopen_mean, _ = _mean_std(reopen[cols].to_numpy().ravel().tolist() if len(reopen) else [])
            rows.append((name, lock_mean, reopen_mean))

    out = pd.DataFrame(rows, columns=["column", "lockdown_avg", "reopen_avg"])
    out["change"] = out["reopen_avg"] - out["lockdown_avg"]
    return out
