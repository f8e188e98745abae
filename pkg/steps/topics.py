"""
Topics step: hashtag/mention rankings, TF-IDF corpus, LDA and coherence-based K
"""

import pandas as pd

from analysis.coherence import chain_seed, coherence_cv, select_topic_count
from analysis.content_mining import (
    HASHTAG, MENTION, build_corpus, load_hashtag_categories, load_stopwords,
    tag_statistics, tag_table, top_tags_frame, variant_group,
)
from analysis.lda_gibbs import topic_report, train_lda
from core.models import StepResult
from core.step_base import StepBase


class Step(StepBase):
    title = "CONTENT ANALYSIS"

    def _tags(self, context, result: StepResult):
        config = context.config.content
        texts = [r.text for r in context.records]
        categories_path = context.path("content.hashtag_categories")
        categories = load_hashtag_categories(categories_path) if categories_path is not None else None

        stats = {}
        for kind in (HASHTAG, MENTION):
            table = tag_table(texts, kind)
            stats[kind] = tag_statistics(texts, table)
            exclude = []
            if kind == HASHTAG:
                table, share = variant_group(table, config.canonical_tag, config.tag_variants)
                stats[kind]["canonical_tag"] = config.canonical_tag
                stats[kind]["canonical_share"] = share
                exclude = [config.canonical_tag]
            result.add_table(f"{kind}_counts", table.to_frame())
            result.add_table(f"{kind}_top", top_tags_frame(
                table, config.top_tags, exclude, categories if kind == HASHTAG else None))
        return stats

    def run(self, context) -> StepResult:
        console = context.console
        config = context.config.content
        seed = context.config.execution.seed
        result = StepResult()

        console.step(1, "Hashtags and mentions...")
        tag_stats = self._tags(context, result)
        h = tag_stats[HASHTAG]
        console.stat(f"{h['per_tweet']:.2f} hashtag(s) per tweet, {h['unique']:,} unique, "
                     f"#{config.canonical_tag} group: {h['canonical_share']:.1%}")

        console.step(2, "Building the document corpus...")
        stopwords = load_stopwords(context.path("content.stopwords"))
        corpus, notices = build_corpus(context.records, stopwords, config.unique_by, config.min_token_length)
        for notice in notices:
            result.add_notice(notice)
        if len(corpus) == 0:
            raise ValueError("empty corpus")
        console.stat(f"{len(corpus):,} document(s), vocabulary {len(corpus.vocabulary):,}")

        train_kwargs = dict(passes=config.passes, weighting=config.weighting, alpha=config.alpha,
                            beta=config.beta, scale=config.tfidf_scale)

        console.step(3, "Choosing the topic count...")
        if config.topic_count is not None:
            K = int(config.topic_count)
            curve = pd.DataFrame(columns=["K", "mean_coherence", "std_coherence", "repeats"])
            console.info(f"fixed by config: K = {K}")
        else:
            K, curve = select_topic_count(
                corpus, config.k_candidates, config.repeats, seed,
                top_n=config.coherence_top_n, window=config.coherence_window,
                threshold=config.elbow_threshold, workers=context.config.execution.workers,
                **train_kwargs,
            )
            console.stat(f"K = {K} (candidates {config.k_candidates}, {config.repeats} repeat(s) each)")
        result.add_table("topic_count_curve", curve)

        console.step(4, f"Training the final model (K={K}, {config.passes} passes)...")
        model = train_lda(corpus, K, seed=chain_seed(seed, K, 0), **train_kwargs)
        coherence = coherence_cv(model, corpus, config.coherence_top_n, config.coherence_window)
        if coherence.missing_words:
            result.add_notice(f"{coherence.missing_words} top word(s) absent from the coherence windows")

        result.add_table("topic_report", topic_report(model, config.report_top))
        result.add_table("topic_coherence", coherence.to_frame())
        result.add_document("topics_summary", {
            "K": K,
            "documents": len(corpus),
            "vocabulary": len(corpus.vocabulary),
            "tokens": int(model.assignments.size),
            "weighting": config.weighting,
            "alpha": model.alpha,
            "beta": model.beta,
            "passes": config.passes,
            "mean_coherence": coherence.mean,
            "missing_words": coherence.missing_words,
            "tags": tag_stats,
        })
        result.add_meta("seeds", {"base": seed, "final_chain": [K, 0]})
        console.stat(f"mean coherence: {coherence.mean:.4f}")
        return result
