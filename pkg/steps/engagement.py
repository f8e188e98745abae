"""
Engagement step: hourly/daily work engagement around lockdown and reopen dates
"""

import pandas as pd

from analysis.engagement import (
    compare_anchor_weeks, reports_frame, summarize_reports,
    top_states_by_business_volume, weekly_window_series,
)
from core.models import ANCHOR_LOCKDOWN, ANCHOR_REOPEN, StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "WORK ENGAGEMENT"

    def _anchor_tables(self, context, anchor: str, weeks_before: int, weeks_after: int, result: StepResult):
        frame = context.frame
        calendar = context.calendar
        present = sorted(set(frame["state"]))

        missing = [s for s in present if calendar.anchor(s, anchor) is None]
        for state in missing:
            result.add_notice(f"{state} has no {anchor} date, excluded from {anchor} engagement")

        ranked = top_states_by_business_volume(frame, calendar, anchor, present)
        states = list(ranked["state"].head(context.config.temporal.top_states))
        result.add_table(f"engagement_{anchor}_states", ranked)

        reports = []
        for state in states:
            reports.extend(weekly_window_series(frame, state, anchor, calendar, weeks_before, weeks_after))

        tables = {}
        for kind in ("hourly", "daily"):
            table = reports_frame(reports, kind)
            tables[kind] = table
            result.add_table(f"engagement_{anchor}_{kind}", table)
            first_week = table[table["offset"] == 0] if len(table) else table
            summary = summarize_reports(first_week.drop(columns=["avg", "std"]))
            result.add_table(f"engagement_{anchor}_{kind}_summary", summary)
        return states, tables

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config.engagement
        result = StepResult()

        console.step(1, "Lockdown windows...")
        lock_states, lock = self._anchor_tables(
            context, ANCHOR_LOCKDOWN, config.lockdown_weeks_before, config.lockdown_weeks_after, result)
        console.stat(f"{len(lock_states)} state(s): {', '.join(lock_states)}")

        console.step(2, "Reopen windows...")
        reopen_states, reopen = self._anchor_tables(
            context, ANCHOR_REOPEN, config.reopen_weeks_before, config.reopen_weeks_after, result)
        console.stat(f"{len(reopen_states)} state(s): {', '.join(reopen_states)}")

        console.step(3, "Lockdown week vs reopen week...")
        for kind in ("hourly", "daily"):
            result.add_table(f"engagement_compare_{kind}", compare_anchor_weeks(lock[kind], reopen[kind]))

        first = lock["hourly"][lock["hourly"]["offset"] == 0] if len(lock["hourly"]) else lock["hourly"]
        if len(first):
            console.stat(f"mean hourly engagement, first lockdown week: {pd.to_numeric(first['avg']).mean():.3f}")
        console.ok(f"{len(result.tables)} table(s)")
        return result
