"""
Sentiment step: polarity ratio grid, emoji usage, daily emoji sentiment series
"""

from analysis.sentiment import daily_sentiment_series, emoji_usage, load_lexicon, polarity_ratio_grid
from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "SENTIMENT"

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config.sentiment
        counts = context.emoji_counts
        result = StepResult()

        console.step(1, "Polarity / subjectivity grid...")
        lexicon = load_lexicon(context.path("sentiment.lexicon"))
        grid = polarity_ratio_grid(counts["text"], lexicon,
                                   config.subjectivity_thresholds, config.polarity_thresholds)
        result.add_table("polarity_ratio_grid", grid)
        base = grid.iloc[0]
        console.stat(f"s>{base['s']}, p>{base['p']}: {base['positive']} positive / {base['negative']} negative")

        console.step(2, "Emoji categories...")
        usage, totals = emoji_usage(counts["text"], context.emoji_table, config.top_emojis)
        result.add_table("emoji_usage", usage)
        result.add_table("emoji_category_totals", totals)
        for row in totals.itertuples(index=False):
            console.stat(f"{row.category}: {row.count:,}")
        if int(totals["count"].sum()) == 0:
            result.add_notice("no classified emojis in the corpus")

        console.step(3, "Daily series...")
        national = daily_sentiment_series(counts, group_by="all", weighting=config.weighting)
        per_state = daily_sentiment_series(counts, group_by="state", weighting=config.weighting)
        result.add_table("sentiment_daily_national", national)
        result.add_table("sentiment_daily_state", per_state)
        empty_days = int(national["positive"].isna().sum())
        if empty_days:
            result.add_notice(f"{empty_days} day(s) without emojis (empty shares)")
        console.ok(f"{len(national)} day(s)")
        return result
