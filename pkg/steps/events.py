"""
Events step: emoji sentiment in the week after case/death milestones, lockdown and reopen
"""

import pandas as pd

from analysis.sentiment import build_event_specs
from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "EVENT SENTIMENT"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config.sentiment
        result = StepResult()

        console.step(1, "Event dates...")
        specs = build_event_specs(context.cases, context.calendar, config.event_window_days)
        rows = [(spec.name, state, day.isoformat())
                for spec in specs for state, day in sorted(spec.dates.items())]
        result.add_table("event_dates", pd.DataFrame(rows, columns=["event", "state", "date"]))

        console.step(2, f"Category shares in {config.event_window_days}-day windows...")
        summary, shares, notices = context.event_sentiment
        for notice in notices:
            result.add_notice(notice)
        result.add_table("event_sentiment", summary)
        result.add_table("event_sentiment_states", shares)

        for event, group in summary.groupby("event", sort=False):
            means = dict(zip(group["category"], group["mean"]))
            n = int(group["n_states"].iloc[0])
            if n:
                console.stat(f"{event}: " + ", ".join(f"{c} {v:.1f}%" for c, v in means.items()) + f" ({n} states)")
        return result
