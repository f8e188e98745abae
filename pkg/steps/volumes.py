"""
Volumes step: daily series, hour-of-week matrices, phases, workweek gap
"""

import pandas as pd

from analysis.temporal import (
    ALL_STATES, build_histograms, daily_pivot, matrices_frame, monthly_state_counts,
    phase_column, phase_matrices, top_states_by_volume, workweek_gap_table,
)
from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "TEMPORAL PATTERNS"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config
        window = (config.ingest.window_start, config.ingest.window_end)
        excluded = config.temporal.excluded_dates
        frame = context.frame
        result = StepResult()

        console.step(1, "Daily volumes...")
        national_daily, national = build_histograms(frame, "all", window, excluded)
        state_daily, per_state = build_histograms(frame, "state", window, excluded)
        result.add_table("daily_volume_national", national_daily)
        result.add_table("daily_volume_state", state_daily)
        result.add_table("monthly_state_counts", monthly_state_counts(frame))
        console.stat(f"{int(national_daily['count'].sum()):,} tweets over {len(national_daily)} day(s)")

        top = top_states_by_volume(state_daily, config.temporal.top_states)
        wide = daily_pivot(state_daily, window)
        result.add_table("daily_volume_top_states", wide[[s for s in top if s in wide.columns]].reset_index())
        console.stat(f"top states: {', '.join(top)}")

        console.step(2, "Hour-of-week matrices...")
        result.add_table("hour_week_matrices", matrices_frame({**national, **per_state}))

        console.step(3, "Phases...")
        phases = context.phases
        in_range = frame[(frame["local_date"] >= phases[0].start) & (frame["local_date"] <= phases[-1].end)]
        labels = pd.Series(phase_column(in_range["local_date"], phases), dtype=object)
        counts = labels.value_counts()
        result.add_table("phase_volumes", pd.DataFrame({
            "phase": [p.id for p in phases],
            "start": [p.start.isoformat() for p in phases],
            "end": [p.end.isoformat() for p in phases],
            "count": [int(counts.get(p.id, 0)) for p in phases],
        }))

        by_phase = phase_matrices(frame, phases, excluded)
        result.add_table("phase_matrices", matrices_frame(by_phase).rename(columns={"state": "phase"}))

        console.step(4, "Workweek gap...")
        gaps = []
        for key, matrix in [(ALL_STATES, national[ALL_STATES])] + sorted(by_phase.items()):
            try:
                gap = workweek_gap_table(matrix)
            except ValueError as e:
                result.add_notice(f"workweek gap for {key} skipped ({e})")
                continue
            gap.insert(0, "period", key)
            gaps.append(gap)
        if gaps:
            result.add_table("workweek_gap", pd.concat(gaps, ignore_index=True))

        console.ok(f"{len(result.tables)} table(s)")
        return result
