"""
Tests local-time conversion, phases, hour-of-week matrices and the workweek gap.
"""

from datetime import date, datetime
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
import pytz

from analysis.temporal import (
    ALL_STATES, assign_phase, build_histograms, daily_pivot, localize_frame, matrix_from_frame,
    monthly_state_counts, phase_matrices, to_local, top_states_by_volume, workweek_gap_table,
)
from core.models import HourWeekMatrix, Phase
from core.states import load_clock_rules


RULES = load_clock_rules(Path(__file__).parent / "resources" / "state_clock_rules.csv")
PHASES = [
    Phase("P1", date(2020, 1, 25), date(2020, 2, 24)),
    Phase("P2", date(2020, 2, 25), date(2020, 3, 14)),
    Phase("P3", date(2020, 3, 15), date(2020, 5, 10)),
]


def utc(*args):
    return pytz.utc.localize(datetime(*args))


# (utc timestamp, state, local date, hour, weekday, offset, phase)
GOLDEN = [
    (utc(2020, 3, 7, 4, 59, 59), "NY", date(2020, 3, 6), 23, 5, -5, "P2"),
    (utc(2020, 3, 8, 4, 30), "NY", date(2020, 3, 7), 23, 6, -5, "P2"),
    (utc(2020, 3, 8, 5, 0), "NY", date(2020, 3, 8), 1, 7, -4, "P2"),
    (utc(2020, 3, 8, 8, 0), "CA", date(2020, 3, 8), 1, 7, -7, "P2"),
    (utc(2020, 7, 1, 12, 0), "AZ", date(2020, 7, 1), 5, 3, -7, None),
    (utc(2020, 2, 1, 10, 0), "HI", date(2020, 2, 1), 0, 6, -10, "P1"),
    (utc(2020, 1, 25, 4, 0), "NY", date(2020, 1, 24), 23, 5, -5, None),
    (utc(2020, 1, 25, 5, 0), "NY", date(2020, 1, 25), 0, 6, -5, "P1"),
    (utc(2020, 5, 10, 6, 59), "CA", date(2020, 5, 9), 23, 6, -7, "P3"),
    (utc(2020, 5, 10, 7, 0), "CA", date(2020, 5, 10), 0, 7, -7, "P3"),
    (utc(2020, 4, 1, 17, 30), "TX", date(2020, 4, 1), 12, 3, -5, "P3"),
    (utc(2020, 11, 1, 4, 30), "NY", date(2020, 11, 1), 0, 7, -4, None),
    (utc(2020, 11, 1, 5, 30), "NY", date(2020, 11, 1), 0, 7, -5, None),
    (utc(2020, 2, 25, 5, 0), "NY", date(2020, 2, 25), 0, 2, -5, "P2"),
    (utc(2020, 2, 25, 4, 59), "NY", date(2020, 2, 24), 23, 1, -5, "P1"),
    (utc(2020, 3, 15, 6, 0), "IL", date(2020, 3, 15), 1, 7, -5, "P3"),
    (utc(2020, 3, 15, 4, 59), "IL", date(2020, 3, 14), 23, 6, -5, "P2"),
    (utc(2020, 3, 20, 9, 15), "AK", date(2020, 3, 20), 1, 5, -8, "P3"),
    (utc(2020, 4, 20, 15, 45), "WA", date(2020, 4, 20), 8, 1, -7, "P3"),
    (utc(2020, 2, 14, 0, 30), "CO", date(2020, 2, 13), 17, 4, -7, "P1"),
]


@pytest.mark.parametrize("moment,state,local_date,hour,weekday,offset,phase", GOLDEN)
def test_to_local_golden(moment, state, local_date, hour, weekday, offset, phase):
    local = to_local(moment, state, RULES)
    assert (local.date, local.hour, local.weekday, local.offset) == (local_date, hour, weekday, offset)
    if phase is None:
        with pytest.raises(ValueError):
            assign_phase(local.date, PHASES)
    else:
        assert assign_phase(local.date, PHASES).id == phase


def test_localize_frame_matches_scalar_conversion():
    frame = pd.DataFrame({
        "created_at_utc": pd.to_datetime([g[0] for g in GOLDEN], utc=True),
        "state": [g[1] for g in GOLDEN],
    })
    local = localize_frame(frame, RULES)
    assert list(local["local_date"]) == [g[2] for g in GOLDEN]
    assert list(local["hour"]) == [g[3] for g in GOLDEN]
    assert list(local["weekday"]) == [g[4] for g in GOLDEN]
    assert list(local["utc_offset"]) == [g[5] for g in GOLDEN]


def test_unknown_state_rejected():
    with pytest.raises(ValueError, match="unknown state"):
        to_local(utc(2020, 3, 1), "PR", RULES)
    frame = pd.DataFrame({"created_at_utc": pd.to_datetime([utc(2020, 3, 1)], utc=True), "state": ["ZZ"]})
    with pytest.raises(ValueError):
        localize_frame(frame, RULES)


def local_frame(rows):
    """rows of (local_date, hour, weekday, state)."""
    return pd.DataFrame(rows, columns=["local_date", "hour", "weekday", "state"])


def test_histograms_totals_and_merge():
    rng = np.random.default_rng(3)
    days = [date(2020, 3, 1 + int(d)) for d in rng.integers(0, 20, 500)]
    rows = [(d, int(h), d.isoweekday(), s) for d, h, s in
            zip(days, rng.integers(0, 24, 500), rng.choice(["NY", "CA", "TX"], 500))]
    frame = local_frame(rows)

    daily, national = build_histograms(frame, "all")
    _, by_state = build_histograms(frame, "state")
    assert national[ALL_STATES].total == 500 == daily["count"].sum()
    assert national[ALL_STATES].check()
    merged = HourWeekMatrix()
    for matrix in by_state.values():
        merged = merged + matrix
    assert merged == national[ALL_STATES]

    first, second = frame.iloc[:200], frame.iloc[200:]
    assert matrix_from_frame(first) + matrix_from_frame(second) == national[ALL_STATES]


def test_window_and_excluded_dates():
    frame = local_frame([
        (date(2020, 3, 1), 10, 7, "NY"),
        (date(2020, 3, 2), 10, 1, "NY"),
        (date(2020, 3, 3), 10, 2, "NY"),
        (date(2020, 3, 9), 10, 1, "NY"),
    ])
    daily, matrices = build_histograms(frame, "all", (date(2020, 3, 1), date(2020, 3, 3)),
                                       excluded_dates=[date(2020, 3, 2)])
    assert list(daily["date"]) == ["2020-03-01", "2020-03-03"]
    assert matrices[ALL_STATES].total == 2

    with pytest.raises(ValueError):
        build_histograms(frame, "all", (date(2020, 3, 3), date(2020, 3, 1)))


def test_phase_matrices_cover_each_phase():
    frame = local_frame([
        (date(2020, 2, 1), 9, 6, "NY"),
        (date(2020, 3, 1), 9, 7, "NY"),
        (date(2020, 4, 1), 9, 3, "CA"),
        (date(2020, 4, 2), 9, 4, "CA"),
    ])
    matrices = phase_matrices(frame, PHASES)
    assert {k: m.total for k, m in matrices.items()} == {"P1": 1, "P2": 1, "P3": 2}


def test_workweek_gap_sums_to_zero():
    counts = np.zeros((7, 24), dtype=np.int64)
    counts[0:5, 9] = 10
    counts[5:7, 13] = 4
    counts[2, 13] = 5
    table = workweek_gap_table(HourWeekMatrix(counts))
    assert abs(table["gap"].sum()) < 1e-12
    assert table.loc[13, "color"] == "green"
    assert table.loc[9, "color"] == "red"
    assert table.loc[9, "business_hour"] and not table.loc[20, "business_hour"]

    with pytest.raises(ValueError):
        workweek_gap_table(HourWeekMatrix())


def test_monthly_counts_and_top_states():
    frame = local_frame([
        (date(2020, 2, 28), 1, 5, "NY"),
        (date(2020, 3, 1), 1, 7, "NY"),
        (date(2020, 3, 2), 1, 1, "CA"),
        (date(2020, 3, 2), 1, 1, "TX"),
    ])
    monthly = monthly_state_counts(frame)
    assert monthly.values.tolist() == [["2020-02", "NY", 1], ["2020-03", "CA", 1],
                                       ["2020-03", "NY", 1], ["2020-03", "TX", 1]]
    daily, _ = build_histograms(frame, "state")
    assert top_states_by_volume(daily, 2) == ["NY", "CA"]

    wide = daily_pivot(daily, (date(2020, 2, 28), date(2020, 3, 3)))
    assert list(wide.index) == ["2020-02-28", "2020-02-29", "2020-03-01", "2020-03-02", "2020-03-03"]
    assert list(wide.columns) == ["CA", "NY", "TX"]
    assert wide.values.sum() == 4
