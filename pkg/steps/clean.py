"""
Clean step: bot detection and removal, per-user activity distribution
"""

from collections import Counter

from core.models import StepResult
from core.step_base import StepBase
from data.corpus_cleaner import activity_summary, user_activity_table


class Step(StepBase):
    title = "BOT REMOVAL"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config
        ingest = context.ingest

        console.step(1, "Detecting bot accounts...")
        kept, detection, removed = context.cleaning
        console.stat(f"bots: {len(detection.bots)} "
                     f"(volume: {detection.rule_counts['volume']}, interval: {detection.rule_counts['interval']})")
        console.stat(f"removed tweets: {sum(removed.values()):,}  kept: {len(kept):,}")

        console.step(2, "User activity distribution...")
        window = (config.ingest.window_start, config.ingest.window_end)
        summary = activity_summary(ingest.records, window)
        console.stat(f"users: {summary['users']:,}  with <= 10 tweets: {summary['light_user_share']:.1%}")

        report = detection.report.copy()
        per_user = Counter(r.user_id for r in ingest.records if r.user_id in detection.bots)
        report["removed_tweets"] = [per_user.get(u, 0) for u in report["user_id"]]

        result = StepResult()
        result.add_table("bot_report", report.sort_values("user_id").reset_index(drop=True))
        result.add_table("user_activity", user_activity_table(ingest.records))
        result.add_document("cleaning_summary", {
            "rules": {
                "cap": config.cleaning.cap,
                "floor": config.cleaning.floor,
                "coverage": config.cleaning.coverage,
                "top_intervals": config.cleaning.top_intervals,
            },
            "bots": detection.rule_counts,
            "removed_tweets": removed,
            "input_records": len(ingest.records),
            "kept_records": len(kept),
            "activity": summary,
        })
        return result
