"""
Ingest step: archived tweet files -> filtered, merged, US-geotagged corpus
"""

from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "INGEST"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config.ingest

        console.step(1, "Reading tweet archives...")
        console.info(f"primary: {len(config.primary_inputs)} file(s), "
                     f"compensation: {len(config.compensation_inputs)} file(s)")
        console.info(f"window: {config.window_start} -> {config.window_end}")

        ingest = context.ingest
        counters = ingest.counters

        console.step(2, "Counters")
        console.stat(f"lines: {counters['lines']:,}")
        console.stat(f"skipped: {counters['skipped']:,} {counters['skips']}")
        console.stat(f"retweets: {counters['retweets']:,}  keyword rejected: {counters['keyword_rejected']:,}")
        console.stat(f"duplicates: {counters['duplicates']:,}  geo rejected: {counters['geo_rejected']:,}")
        console.stat(f"output: {counters['output']:,} "
                     f"({counters['compensation_share']:.1%} from the compensation corpus)")

        result = StepResult()
        result.add_table("ingest_sources_daily", ingest.source_daily)
        result.add_document("ingest_counters", counters)
        result.add_records("records", ingest.records)
        result.add_meta("counters", counters)
        if not counters["reconciles"]:
            result.add_notice("ingest counters do not reconcile")
        else:
            console.ok("counters reconcile")
        return result
