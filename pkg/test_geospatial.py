"""
Tests state tables, normalization and county resolution (polygon, cache, remote fallback).
"""

import json

import geopandas as gpd
import numpy as np
import pandas as pd
import pytest
from geopy.exc import GeocoderServiceError
from shapely.geometry import Polygon, box

from analysis.geospatial import (
    CountyResolver, county_density_table, gps_points_table, load_boundaries, normalize,
    state_counts, state_share_table,
)
from core.models import METHOD_CACHE, METHOD_POLYGON, METHOD_REMOTE, StateStats


L_SHAPE = [(0, 0), (10, 0), (10, 4), (4, 4), (4, 10), (0, 10)]
TRIANGLE = [(12, 0), (20, 0), (16, 8)]
NOTCHED = [(0, 12), (20, 12), (20, 20), (10, 15), (0, 20)]
CHEVRON = [(22, 0), (30, 0), (30, 8), (26, 4), (22, 8)]
HEXAGON = [(24, 12), (28, 12), (30, 16), (28, 20), (24, 20), (22, 16)]
FIXTURE_COUNTIES = [
    ("Ell", "CO", L_SHAPE), ("Tri", "CO", TRIANGLE), ("Notch", "NY", NOTCHED),
    ("Chev", "TX", CHEVRON), ("Hex", "CA", HEXAGON),
]


def boundaries():
    return gpd.GeoDataFrame(
        {"county": ["Ell", "Tri", "Notch", "Chev", "Hex"], "state": ["CO", "Colorado", "NY", "TX", "California"]},
        geometry=[Polygon(vertices) for _, _, vertices in FIXTURE_COUNTIES],
        crs="EPSG:4326",
    )


def ray_casting(x, y, vertices):
    """Even-odd rule."""
    inside = False
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def test_polygon_lookup_matches_ray_casting():
    resolver = CountyResolver(boundaries=boundaries())
    rng = np.random.default_rng(11)
    points = np.column_stack([rng.uniform(-1.0, 31.0, 10_000), rng.uniform(-1.0, 21.0, 10_000)])
    for lon, lat in points:
        expected = (None, None)
        for county, state, vertices in FIXTURE_COUNTIES:
            if ray_casting(lon, lat, vertices):
                expected = (county, state)
                break
        assert resolver.polygon_lookup((float(lat), float(lon))) == expected


def test_edge_points_are_inside_and_first_polygon_wins():
    overlapping = gpd.GeoDataFrame(
        {"county": ["First", "Second"], "state": ["TX", "TX"]},
        geometry=[box(0, 0, 2, 2), box(1, 1, 3, 3)],
        crs="EPSG:4326",
    )
    resolver = CountyResolver(boundaries=overlapping)
    assert resolver.polygon_lookup((0.0, 1.0)) == ("First", "TX")   # on the bottom edge
    assert resolver.polygon_lookup((1.5, 1.5)) == ("First", "TX")
    assert resolver.polygon_lookup((2.5, 2.5)) == ("Second", "TX")
    assert resolver.polygon_lookup((5.0, 5.0)) == (None, None)


def test_cache_hits_and_persistence(tmp_path):
    cache = tmp_path / "geocache.json"
    resolver = CountyResolver(boundaries=boundaries(), cache_path=str(cache))
    first = resolver.resolve_county((2.00001, 2.0))
    second = resolver.resolve_county((2.00003, 2.0))   # same 4-decimal key
    assert first.method == METHOD_POLYGON
    assert second.method == METHOD_CACHE
    assert (second.county, second.state) == ("Ell", "CO")
    assert resolver.stats["cache"] == 1

    resolver.save_cache()
    assert json.loads(cache.read_text(encoding="utf-8")) == {"2.0000,2.0000": {"county": "Ell", "state": "CO"}}
    reloaded = CountyResolver(boundaries=boundaries(), cache_path=str(cache))
    assert reloaded.resolve_county((2.0, 2.0)).method == METHOD_CACHE


class FakeLocation:
    def __init__(self, address):
        self.raw = {"address": address}


class FakeGeocoder:
    def __init__(self, fail=False):
        self.fail = fail
        self.calls = 0

    def reverse(self, point, **kwargs):
        self.calls += 1
        if self.fail:
            raise GeocoderServiceError("service down")
        return FakeLocation({"ISO3166-2-lvl4": "US-CO", "county": "Denver County", "state": "Colorado"})


def remote_resolver(geocoder, with_boundaries=True):
    return CountyResolver(boundaries=boundaries() if with_boundaries else None, mode="remote",
                          geocoder=geocoder, min_delay_seconds=0.0, max_retries=0, error_wait_seconds=0.0)


def test_remote_mode_uses_geocoder_once_per_point():
    geocoder = FakeGeocoder()
    resolver = remote_resolver(geocoder)
    resolution = resolver.resolve_county((39.7392, -104.9903))
    assert (resolution.county, resolution.state, resolution.method) == ("Denver County", "CO", METHOD_REMOTE)
    assert resolver.resolve_county((39.7392, -104.9903)).method == METHOD_CACHE
    assert geocoder.calls == 1


def test_remote_failure_falls_back_to_polygons():
    resolver = remote_resolver(FakeGeocoder(fail=True))
    resolution = resolver.resolve_county((15.0, 2.0))
    assert (resolution.county, resolution.state, resolution.method) == ("Notch", "NY", METHOD_POLYGON)
    assert resolver.stats["remote_failures"] == 1

    unresolved = remote_resolver(FakeGeocoder(fail=True), with_boundaries=False).resolve_county((15.0, 2.0))
    assert unresolved.county is None and unresolved.state is None


def test_polygon_mode_requires_boundaries():
    with pytest.raises(ValueError):
        CountyResolver(boundaries=None, mode="polygon")
    with pytest.raises(ValueError):
        CountyResolver(boundaries=boundaries(), mode="telepathy")


def test_load_boundaries_geojson(tmp_path):
    path = tmp_path / "counties.geojson"
    path.write_text(boundaries().to_json(), encoding="utf-8")
    loaded = load_boundaries(path)
    assert list(loaded["county"]) == ["Ell", "Tri", "Notch", "Chev", "Hex"]
    assert CountyResolver(boundaries=loaded).state_of((15.0, 2.0)) == "NY"
    with pytest.raises(FileNotFoundError):
        load_boundaries(tmp_path / "missing.geojson")


def points_frame():
    return pd.DataFrame({
        "tweet_id": ["3", "1", "2", "4"],
        "state": ["CO", "CO", "NY", "CO"],
        "lat": [2.0, 1.0, 15.0, np.nan],
        "lon": [2.0, 1.0, 2.0, np.nan],
        "precision": ["exact_gps", "exact_gps", "exact_gps", "bounding_place"],
    })


def test_county_density_and_gps_points():
    density, unresolved, notices = county_density_table(points_frame(), CountyResolver(boundaries=boundaries()))
    assert density.values.tolist() == [["CO", "Ell", 2], ["NY", "Notch", 1]]
    assert unresolved == 0 and notices == []
    assert list(gps_points_table(points_frame())["tweet_id"]) == ["1", "2", "3"]


def test_state_shares_and_normalization():
    frame = pd.DataFrame({"state": ["NY"] * 6 + ["CA"] * 3 + ["WY"]})
    shares = state_share_table(frame)
    assert shares["percent"].sum() == pytest.approx(100.0)
    assert shares.set_index("state").loc["NY", "percent"] == pytest.approx(60.0)

    stats = {
        "NY": StateStats("NY", 2_000_000, cum_cases=600, cum_deaths=30),
        "CA": StateStats("CA", 3_000_000, cum_cases=300, cum_deaths=0),
    }
    counts = state_counts(frame)
    per_resident, notices = normalize(counts, stats, "per_1000_residents")
    assert per_resident.set_index("state").loc["NY", "rate"] == pytest.approx(0.003)
    assert notices == ["WY excluded from per_1000_residents table (no statistics)"]

    per_death, notices = normalize(counts, stats, "per_death")
    assert list(per_death["state"]) == ["NY"]
    assert "CA excluded from per_death table (zero denominator)" in notices

    with pytest.raises(ValueError):
        normalize(counts, stats, "per_acre")
    with pytest.raises(ValueError):
        normalize(state_counts(pd.DataFrame({"state": ["CA"]})), stats, "per_death")
    with pytest.raises(ValueError, match="empty corpus"):
        state_share_table(pd.DataFrame(columns=["state"]))
