"""
US state table (50 states + DC) and the state-local clock rules.

Place names are resolved to a state abbreviation from a trailing ", XX"
suffix or from an exact full state name appearing as one comma-separated part.
"""

from pathlib import Path
from typing import Dict, Optional, Tuple
from datetime import date

import pandas as pd

from core.models import StateClockRule


STATE_NAMES: Dict[str, str] = {
    'AL': 'Alabama', 'AK': 'Alaska', 'AZ': 'Arizona', 'AR': 'Arkansas',
    'CA': 'California', 'CO': 'Colorado', 'CT': 'Connecticut', 'DE': 'Delaware',
    'DC': 'District of Columbia', 'FL': 'Florida', 'GA': 'Georgia', 'HI': 'Hawaii',
    'ID': 'Idaho', 'IL': 'Illinois', 'IN': 'Indiana', 'IA': 'Iowa',
    'KS': 'Kansas', 'KY': 'Kentucky', 'LA': 'Louisiana', 'ME': 'Maine',
    'MD': 'Maryland', 'MA': 'Massachusetts', 'MI': 'Michigan', 'MN': 'Minnesota',
    'MS': 'Mississippi', 'MO': 'Missouri', 'MT': 'Montana', 'NE': 'Nebraska',
    'NV': 'Nevada', 'NH': 'New Hampshire', 'NJ': 'New Jersey', 'NM': 'New Mexico',
    'NY': 'New York', 'NC': 'North Carolina', 'ND': 'North Dakota', 'OH': 'Ohio',
    'OK': 'Oklahoma', 'OR': 'Oregon', 'PA': 'Pennsylvania', 'RI': 'Rhode Island',
    'SC': 'South Carolina', 'SD': 'South Dakota', 'TN': 'Tennessee', 'TX': 'Texas',
    'UT': 'Utah', 'VT': 'Vermont', 'VA': 'Virginia', 'WA': 'Washington',
    'WV': 'West Virginia', 'WI': 'Wisconsin', 'WY': 'Wyoming',
}

NAME_TO_STATE: Dict[str, str] = {name.lower(): abbr for abbr, name in STATE_NAMES.items()}
# common spelling of DC in place names
NAME_TO_STATE['washington, d.c.'] = 'DC'
NAME_TO_STATE['washington dc'] = 'DC'
NAME_TO_STATE['washington, dc'] = 'DC'


def is_state(code: Optional[str]) -> bool:
    return code is not None and code.upper() in STATE_NAMES


def normalize_state(code: str) -> str:
    """Upper-case abbreviation, raises on anything outside the 50 states + DC."""
    upper = str(code).strip().upper()
    if upper not in STATE_NAMES:
        raise ValueError(f"unknown state: {code}")
    return upper


def state_from_place(full_name: Optional[str]) -> Tuple[Optional[str], str]:
    """
    Resolve a place full name to a state abbreviation.

    Returns:
        (state, status) where status is 'ok', 'no_state' or 'ambiguous'

    Examples:
        "Manhattan, NY"     -> ('NY', 'ok')
        "Texas, USA"        -> ('TX', 'ok')
        "Puerto Rico, USA"  -> (None, 'no_state')
    """
    if not full_name:
        return None, 'no_state'

    whole = full_name.strip().lower()
    if whole in NAME_TO_STATE:
        return NAME_TO_STATE[whole], 'ok'

    parts = [p.strip() for p in full_name.split(',') if p.strip()]
    candidates = set()

    # Trailing ", XX" abbreviation
    if len(parts) >= 2 and len(parts[-1]) == 2 and parts[-1].upper() in STATE_NAMES:
        candidates.add(parts[-1].upper())

    # Exact full state name in any part
    for part in parts:
        abbr = NAME_TO_STATE.get(part.lower())
        if abbr is not None:
            candidates.add(abbr)

    if not candidates:
        return None, 'no_state'
    if len(candidates) > 1:
        return None, 'ambiguous'
    return candidates.pop(), 'ok'


def _parse_optional_date(value) -> Optional[date]:
    if value is None or (isinstance(value, float) and pd.isna(value)) or str(value).strip() == '':
        return None
    return pd.Timestamp(str(value)).date()


def load_clock_rules(path) -> Dict[str, StateClockRule]:
    """
    Load the state clock rule table (CSV: state,name,std_offset,observes_dst,dst_start,dst_end).

    Raises:
        FileNotFoundError: table missing
        ValueError: duplicate or unknown state, or a DST rule without a start date
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"State clock rule table not found: {path}")

    table = pd.read_csv(path, dtype={'state': str, 'dst_start': str, 'dst_end': str},
                        keep_default_na=False)
    rules: Dict[str, StateClockRule] = {}

    for row_number, row in enumerate(table.itertuples(index=False), start=2):
        state = str(row.state).strip().upper()
        if state not in STATE_NAMES:
            raise ValueError(f"{path}: row {row_number}: unknown state '{row.state}'")
        if state in rules:
            raise ValueError(f"{path}: row {row_number}: duplicate rule for {state}")

        observes = str(row.observes_dst).strip().lower() in ('true', '1', 'yes')
        dst_start = _parse_optional_date(row.dst_start)
        dst_end = _parse_optional_date(row.dst_end)
        if observes and dst_start is None:
            raise ValueError(f"{path}: row {row_number}: {state} observes DST without dst_start")

        rules[state] = StateClockRule(
            state=state,
            std_offset=int(row.std_offset),
            observes_dst=observes,
            dst_start=dst_start,
            dst_end=dst_end,
        )

    return rules
