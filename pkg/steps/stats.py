"""
Stats step: pairwise state correlations of daily volumes, MANOVA across events
"""

from analysis.sentiment import CATEGORIES
from analysis.stats import manova_one_way, pairwise_state_correlations
from analysis.temporal import build_histograms, daily_pivot
from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "STATISTICS"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config
        result = StepResult()

        console.step(1, "Pairwise state correlations...")
        window = (config.ingest.window_start, config.ingest.window_end)
        state_daily, _ = build_histograms(context.frame, "state", window, config.temporal.excluded_dates)
        wide = daily_pivot(state_daily, window)
        if wide.shape[1] < 2:
            result.add_notice("pairwise correlations need at least 2 states; skipped")
        else:
            fraction, matrix, pairs, notices = pairwise_state_correlations(
                wide, config.stats.r_threshold, config.stats.p_threshold)
            for notice in notices:
                result.add_notice(notice)
            result.add_table("state_correlation_matrix", matrix.reset_index())
            result.add_table("state_correlation_pairs", pairs)
            result.add_document("state_correlation_summary", {
                "states": int(wide.shape[1]),
                "pairs": int(len(pairs)),
                "qualifying_fraction": fraction,
                "r_threshold": config.stats.r_threshold,
                "p_threshold": config.stats.p_threshold,
            })
            console.stat(f"{fraction:.1%} of {len(pairs)} pair(s) with r > {config.stats.r_threshold} "
                         f"and p < {config.stats.p_threshold}")

        console.step(2, "MANOVA of event sentiment...")
        _, shares, _ = context.event_sentiment
        groups, events = [], []
        for event, group in shares.groupby("event", sort=True):
            groups.append(group[list(CATEGORIES)].to_numpy(dtype=float))
            events.append(event)
        try:
            manova = manova_one_way(groups, config.stats.manova_components)
        except ValueError as e:
            result.add_notice(f"MANOVA skipped ({e})")
            result.add_document("manova", {"error": str(e), "events": events})
            return result

        document = manova.to_dict()
        document["events"] = events
        document["group_sizes"] = [int(len(g)) for g in groups]
        document["component_names"] = [CATEGORIES[i] for i in config.stats.manova_components]
        result.add_document("manova", document)
        console.stat(f"Wilks' lambda {manova.wilks_lambda:.4f}, F {manova.approx_F:.3f}, p {manova.p_value:.4f}")
        return result
