"""
Resource table loaders: event calendar, state population, cumulative cases/deaths,
county population.

All tables are CSV; state columns take two-letter abbreviations.
"""

from datetime import date
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from core.models import EventCalendar, StateStats
from core.states import NAME_TO_STATE, _parse_optional_date, normalize_state


def _read_table(path, columns: List[str], what: str) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{what} not found: {path}")
    table = pd.read_csv(path, dtype=str, keep_default_na=False, comment="#")
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise ValueError(f"{path}: missing column(s) {missing}")
    return table


def _state(value: str, path, row: int) -> str:
    try:
        return normalize_state(value)
    except ValueError:
        raise ValueError(f"{path}: row {row}: unknown state '{value}'")


def _count(value: str, path, row: int, column: str) -> int:
    try:
        number = int(float(value))
    except ValueError:
        raise ValueError(f"{path}: row {row}: {column} must be a number, got '{value}'")
    if number < 0:
        raise ValueError(f"{path}: row {row}: {column} must be >= 0, got {number}")
    return number


def load_event_calendar(path) -> EventCalendar:
    """CSV state,lockdown,reopen (either date may be blank)."""
    table = _read_table(path, ["state", "lockdown", "reopen"], "Event calendar")
    lockdown: Dict[str, date] = {}
    reopen: Dict[str, date] = {}
    for row, (state, lock, open_) in enumerate(zip(table["state"], table["lockdown"], table["reopen"]), start=2):
        state = _state(state, path, row)
        if state in lockdown or state in reopen:
            raise ValueError(f"{path}: row {row}: duplicate state {state}")
        lock_date, reopen_date = _parse_optional_date(lock), _parse_optional_date(open_)
        if lock_date is not None:
            lockdown[state] = lock_date
        if reopen_date is not None:
            reopen[state] = reopen_date
    try:
        return EventCalendar(lockdown=lockdown, reopen=reopen)
    except ValueError as e:
        raise ValueError(f"{path}: {e}")


def load_population(path) -> Dict[str, int]:
    """CSV state,population."""
    table = _read_table(path, ["state", "population"], "State population table")
    population: Dict[str, int] = {}
    for row, (state, value) in enumerate(zip(table["state"], table["population"]), start=2):
        state = _state(state, path, row)
        if state in population:
            raise ValueError(f"{path}: row {row}: duplicate state {state}")
        population[state] = _count(value, path, row, "population")
    return population


def load_cases(path) -> pd.DataFrame:
    """
    CSV state,date,cum_cases,cum_deaths -> frame sorted by (state, date), dates as datetime.date.

    The daily us-states layout (date,state,fips,cases,deaths with full state
    names) is accepted as well; rows of territories are skipped.
    """
    path = Path(path)
    if path.exists():
        header = pd.read_csv(path, nrows=0, comment="#").columns
        if "cases" in header and "cum_cases" not in header:
            table = _read_table(path, ["state", "date", "cases", "deaths"], "Case table")
            table = table.rename(columns={"cases": "cum_cases", "deaths": "cum_deaths"})
            table["state"] = table["state"].map(lambda name: NAME_TO_STATE.get(name.strip().lower(), ""))
            table = table[table["state"] != ""]
        else:
            table = _read_table(path, ["state", "date", "cum_cases", "cum_deaths"], "Case table")
    else:
        table = _read_table(path, ["state", "date", "cum_cases", "cum_deaths"], "Case table")

    rows = []
    for row, record in enumerate(table.itertuples(index=False), start=2):
        day = _parse_optional_date(record.date)
        if day is None:
            raise ValueError(f"{path}: row {row}: missing date")
        rows.append((
            _state(record.state, path, row),
            day,
            _count(record.cum_cases, path, row, "cum_cases"),
            _count(record.cum_deaths, path, row, "cum_deaths"),
        ))
    cases = pd.DataFrame(rows, columns=["state", "date", "cum_cases", "cum_deaths"])
    if cases.duplicated(["state", "date"]).any():
        first = cases[cases.duplicated(["state", "date"])].iloc[0]
        raise ValueError(f"{path}: duplicate row for {first['state']} on {first['date']}")
    return cases.sort_values(["state", "date"]).reset_index(drop=True)


def state_statistics(population: Dict[str, int], cases: pd.DataFrame,
                     snapshot: Optional[date] = None) -> Dict[str, StateStats]:
    """
    Population plus cumulative cases/deaths on the last case row at or before `snapshot`
    (states without such a row get 0/0).
    """
    latest = cases
    if snapshot is not None and len(cases):
        latest = cases[cases["date"] <= snapshot]
    latest = latest.groupby("state").tail(1).set_index("state") if len(latest) else latest

    stats = {}
    for state, people in sorted(population.items()):
        if people <= 0:
            continue
        if len(latest) and state in latest.index:
            stats[state] = StateStats(state, people, int(latest.loc[state, "cum_cases"]),
                                      int(latest.loc[state, "cum_deaths"]))
        else:
            stats[state] = StateStats(state, people)
    return stats


def load_county_population(path) -> pd.DataFrame:
    """CSV state,county,population."""
    table = _read_table(path, ["state", "county", "population"], "County population table")
    rows = [
        (_state(s, path, row), c.strip(), _count(p, path, row, "population"))
        for row, (s, c, p) in enumerate(zip(table["state"], table["county"], table["population"]), start=2)
    ]
    return pd.DataFrame(rows, columns=["state", "county", "population"])
