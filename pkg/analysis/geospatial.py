"""
Geospatial analysis

- state shares and normalized volumes (per 1000 residents, per case, per death)
- county resolution of GPS points: cache -> polygon lookup or remote geocoder
- county density table, raw GPS point table

Boundary rule for polygon lookup: a point on a polygon edge counts as inside
(covered_by); when several polygons cover a point the first in file order wins.
"""

import json
import threading
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import geopandas as gpd
import numpy as np
import pandas as pd
from geopy.exc import GeopyError
from geopy.extra.rate_limiter import RateLimiter
from geopy.geocoders import Nominatim
from shapely.geometry import Point

from core.models import (
    CountyResolution, StateStats,
    METHOD_CACHE, METHOD_POLYGON, METHOD_REMOTE, PRECISION_EXACT_GPS,
)
from core.states import NAME_TO_STATE, STATE_NAMES


BASES = ("per_1000_residents", "per_case", "per_death")


# ============================================================================
# STATE TABLES
# ============================================================================

def state_counts(frame: pd.DataFrame) -> pd.DataFrame:
    """state, count sorted by state."""
    if frame.empty:
        return pd.DataFrame(columns=["state", "count"])
    return (frame.groupby("state").size().reset_index(name="count")
            .sort_values("state").reset_index(drop=True))


def state_share_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Percentage of tweets per state (sums to 100)."""
    counts = state_counts(frame)
    total = int(counts["count"].sum()) if len(counts) else 0
    if total == 0:
        raise ValueError("empty corpus")
    counts["percent"] = counts["count"] * 100.0 / total
    return counts


def normalize(counts: pd.DataFrame, stats: Dict[str, StateStats], basis: str) -> Tuple[pd.DataFrame, List[str]]:
    """
    Per-state rate for a normalization basis.

    Returns:
        (state, tweet_count, denominator, rate ; notices for excluded states)

    Raises:
        ValueError: unknown basis, or every denominator is zero
    """
    if basis not in BASES:
        raise ValueError(f"unknown basis '{basis}' (expected one of {BASES})")

    rows, notices, excluded = [], [], []
    for state, count in zip(counts["state"], counts["count"]):
        entry = stats.get(state)
        if entry is None:
            excluded.append(state)
            notices.append(f"{state} excluded from {basis} table (no statistics)")
            continue
        if basis == "per_1000_residents":
            denominator, rate_of = entry.population, lambda c, d: c * 1000.0 / d
        elif basis == "per_case":
            denominator, rate_of = entry.cum_cases, lambda c, d: c / d
        else:
            denominator, rate_of = entry.cum_deaths, lambda c, d: c / d
        if denominator <= 0:
            excluded.append(state)
            notices.append(f"{state} excluded from {basis} table (zero denominator)")
            continue
        rows.append((state, int(count), int(denominator), rate_of(int(count), denominator)))

    if not rows and len(counts):
        raise ValueError(f"all denominators are zero for basis {basis}")
    table = pd.DataFrame(rows, columns=["state", "tweet_count", "denominator", "rate"])
    return table, notices


# ============================================================================
# COUNTY RESOLUTION
# ============================================================================

def _state_abbreviation(value: Any) -> Optional[str]:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return None
    text = str(value).strip()
    if text.upper() in STATE_NAMES:
        return text.upper()
    if text.upper().startswith("US-") and text[3:].upper() in STATE_NAMES:
        return text[3:].upper()
    return NAME_TO_STATE.get(text.lower())


def load_boundaries(path) -> gpd.GeoDataFrame:
    """County polygons; GeoJSON is read directly, other formats through geopandas I/O."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"County boundary file not found: {path}")
    if path.suffix.lower() in (".geojson", ".json"):
        with open(path, "r", encoding="utf-8") as f:
            features = json.load(f)["features"]
        return gpd.GeoDataFrame.from_features(features, crs="EPSG:4326")
    return gpd.read_file(path)


class CountyResolver:
    """
    Point -> (county, state) with a coordinate cache (4-decimal key).

    Modes:
        polygon: point-in-polygon against the boundary file (offline, deterministic)
        remote : reverse geocoder (Nominatim by default), paced and retried,
                 falling back to polygon mode on failure

    Usage:
        resolver = CountyResolver(boundaries=load_boundaries('counties.geojson'))
        resolution = resolver.resolve_county((39.74, -104.99))
    """

    def __init__(
        self,
        boundaries: Optional[gpd.GeoDataFrame] = None,
        mode: str = "polygon",
        county_field: str = "county",
        state_field: str = "state",
        cache_path: Optional[str] = None,
        geocoder: Any = None,
        contact: Optional[str] = None,
        domain: str = "nominatim.openstreetmap.org",
        scheme: str = "https",
        min_delay_seconds: float = 1.0,
        max_retries: int = 2,
        error_wait_seconds: float = 5.0,
    ):
        if mode not in ("polygon", "remote"):
            raise ValueError(f"unknown county resolution mode '{mode}'")
        if mode == "polygon" and boundaries is None:
            raise ValueError("polygon mode needs a county boundary file (geo.boundaries)")

        self.mode = mode
        self.boundaries = boundaries
        self.county_field = county_field
        self.state_field = state_field
        self.cache_path = Path(cache_path) if cache_path else None
        self.cache: Dict[str, Dict[str, Optional[str]]] = {}
        self.stats: Counter = Counter()
        self._lock = threading.Lock()

        if boundaries is not None:
            for col in (county_field, state_field):
                if col not in boundaries.columns:
                    raise ValueError(f"boundary file has no '{col}' property")

        self._reverse = None
        if mode == "remote":
            if geocoder is None:
                user_agent = f"geotweets ({contact})" if contact else "geotweets"
                geocoder = Nominatim(user_agent=user_agent, domain=domain, scheme=scheme)
            self._reverse = RateLimiter(
                geocoder.reverse,
                min_delay_seconds=min_delay_seconds,
                max_retries=max_retries,
                error_wait_seconds=error_wait_seconds,
                swallow_exceptions=False,
            )

        if self.cache_path is not None and self.cache_path.exists():
            with open(self.cache_path, "r", encoding="utf-8") as f:
                self.cache = json.load(f)

    @staticmethod
    def cache_key(point: Tuple[float, float]) -> str:
        lat, lon = point
        return f"{round(lat, 4):.4f},{round(lon, 4):.4f}"

    # ------------------------------------------------------------------

    def polygon_lookup(self, point: Tuple[float, float]) -> Tuple[Optional[str], Optional[str]]:
        lat, lon = point
        hits = self.boundaries.sindex.query(Point(lon, lat), predicate="covered_by")
        if len(hits) == 0:
            return None, None
        row = self.boundaries.iloc[int(np.min(hits))]
        state = _state_abbreviation(row[self.state_field])
        county = row[self.county_field]
        if state is None:
            return None, None
        return (None if pd.isna(county) else str(county)), state

    def _remote_lookup(self, point: Tuple[float, float]) -> Tuple[Optional[str], Optional[str]]:
        location = self._reverse(point, language="en", exactly_one=True)
        if location is None:
            return None, None
        address = (location.raw or {}).get("address", {})
        state = _state_abbreviation(address.get("ISO3166-2-lvl4")) or _state_abbreviation(address.get("state"))
        county = address.get("county")
        if state is None:
            return None, None
        return county, state

    def resolve_county(self, point: Tuple[float, float]) -> CountyResolution:
        key = self.cache_key(point)
        with self._lock:
            cached = self.cache.get(key)
        if cached is not None:
            self.stats["cache"] += 1
            return CountyResolution(point, cached.get("county"), cached.get("state"), METHOD_CACHE)

        method = METHOD_POLYGON
        if self.mode == "remote":
            try:
                county, state = self._remote_lookup(point)
                method = METHOD_REMOTE
            except GeopyError:
                self.stats["remote_failures"] += 1
                if self.boundaries is None:
                    county, state = None, None
                else:
                    county, state = self.polygon_lookup(point)
        else:
            county, state = self.polygon_lookup(point)

        if county is None:
            self.stats["unresolved"] += 1
        self.stats[method] += 1

        with self._lock:
            self.cache[key] = {"county": county, "state": state}
        return CountyResolution(point, county, state, method)

    def state_of(self, point: Tuple[float, float]) -> Optional[str]:
        """Point -> state only (used by ingest for records without a usable place)."""
        return self.resolve_county(point).state

    def save_cache(self, path: Optional[str] = None):
        target = Path(path) if path else self.cache_path
        if target is None:
            return
        with self._lock:
            payload = json.dumps(self.cache, sort_keys=True, ensure_ascii=False, indent=1)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(payload + "\n", encoding="utf-8")


def county_density_table(frame: pd.DataFrame, resolver: CountyResolver) -> Tuple[pd.DataFrame, int, List[str]]:
    """
    Per (state, county) counts of exact-GPS records.

    Returns:
        (table state,county,count ; unresolved count ; notices)
    """
    gps = frame[frame["precision"] == PRECISION_EXACT_GPS] if len(frame) else frame
    if gps.empty:
        return pd.DataFrame(columns=["state", "county", "count"]), 0, ["no GPS-tagged records; county table is empty"]

    counts: Counter = Counter()
    unresolved = 0
    for lat, lon in zip(gps["lat"], gps["lon"]):
        resolution = resolver.resolve_county((float(lat), float(lon)))
        if resolution.county is None:
            unresolved += 1
        else:
            counts[(resolution.state, resolution.county)] += 1

    rows = [(s, c, n) for (s, c), n in sorted(counts.items())]
    notices = [f"{unresolved} GPS point(s) outside every county"] if unresolved else []
    return pd.DataFrame(rows, columns=["state", "county", "count"]), unresolved, notices


def gps_points_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Raw GPS points: tweet_id, state, lat, lon."""
    if frame.empty:
        return pd.DataFrame(columns=["tweet_id", "state", "lat", "lon"])
    gps = frame[frame["precision"] == PRECISION_EXACT_GPS]
    return (gps[["tweet_id", "state", "lat", "lon"]]
            .sort_values("tweet_id").reset_index(drop=True))
