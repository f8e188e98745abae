"""
Geo step: state shares, normalized volumes, correlations, county density
"""

import pandas as pd

from analysis.geospatial import (
    BASES, county_density_table, gps_points_table, normalize, state_counts, state_share_table,
)
from analysis.stats import correlate_against
from core.models import StepResult
from core.step_base import StepBase
from data.resources import load_county_population


class Step(StepBase):
    title = "GEOGRAPHIC PATTERNS"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config
        frame = context.frame
        result = StepResult()

        console.step(1, "State shares...")
        shares = state_share_table(frame)
        result.add_table("state_share", shares)
        leader = shares.sort_values(["count", "state"], ascending=[False, True]).iloc[0]
        console.stat(f"{len(shares)} state(s), largest: {leader['state']} ({leader['percent']:.1f}%)")

        console.step(2, "Normalized volumes...")
        counts = state_counts(frame)
        stats = context.state_stats
        for basis in BASES:
            table, notices = normalize(counts, stats, basis)
            result.add_table(f"state_{basis}", table)
            for notice in notices:
                result.add_notice(notice)

        known = [s for s in counts["state"] if s in stats]
        joined = pd.DataFrame({
            "state": known,
            "tweet_count": [int(counts.loc[counts["state"] == s, "count"].iloc[0]) for s in known],
            "population": [stats[s].population for s in known],
            "cum_cases": [stats[s].cum_cases for s in known],
            "cum_deaths": [stats[s].cum_deaths for s in known],
        })
        if len(joined) >= 2:
            result.add_table("state_correlations",
                             correlate_against(joined, "tweet_count", ["population", "cum_cases", "cum_deaths"]))
        else:
            result.add_notice("state correlations need at least 2 states with statistics")

        console.step(3, "County density...")
        resolver = context.county_resolver
        gps = gps_points_table(frame)
        result.add_table("gps_points", gps)
        if resolver is None:
            result.add_notice("no county boundary file configured (geo.boundaries); county table skipped")
        else:
            density, unresolved, notices = county_density_table(frame, resolver)
            result.add_table("county_density", density)
            for notice in notices:
                result.add_notice(notice)
            resolver.save_cache()
            result.add_meta("county_methods", dict(sorted(resolver.stats.items())))
            result.add_document("county_resolution", {
                "mode": resolver.mode,
                "points": len(gps),
                "unresolved": unresolved,
            })
            console.stat(f"{len(density)} county row(s), {unresolved} unresolved point(s)")

            county_pop_path = context.path("geo.county_population")
            if county_pop_path is not None and len(density):
                merged = density.merge(load_county_population(county_pop_path), on=["state", "county"])
                if len(merged) >= 3:
                    result.add_table("county_correlations", correlate_against(merged, "count", ["population"]))
                else:
                    result.add_notice("county correlation needs at least 3 counties with population")

        console.ok(f"{len(result.tables)} table(s)")
        return result
