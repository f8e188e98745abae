"""
LDA by collapsed Gibbs sampling

The sweep kernel is compiled with numba; uniforms for each sweep are drawn
up front from a numpy Generator so a chain is fully determined by its seed.

Token multiplicities:
    bow          : raw term counts
    tfidf_scaled : max(1, round(tfidf_weight * scale)) per (document, term)
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from numba import njit

from analysis.content_mining import Corpus, term_counts, tfidf


WEIGHTINGS = ("bow", "tfidf_scaled")


@njit(cache=True, nogil=True)
def _gibbs_sweep(doc_index, word_index, z, ndk, nkw, nk, alpha, beta, v_beta, uniforms):
    n_topics = nk.shape[0]
    weights = np.empty(n_topics)
    for i in range(doc_index.shape[0]):
        d = doc_index[i]
        w = word_index[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1

        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + v_beta)
            weights[t] = total

        target = uniforms[i] * total
        k = n_topics - 1
        for t in range(n_topics):
            if target < weights[t]:
                k = t
                break

        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@dataclass
class TopicModel:
    """
    Trained LDA state: count matrices plus the token assignments they came from.
    """
    K: int
    alpha: float
    beta: float
    terms: List[str]
    topic_word: np.ndarray            # K x V counts
    doc_topic: np.ndarray             # D x K counts
    assignments: np.ndarray           # per-token topic
    doc_index: np.ndarray
    word_index: np.ndarray
    passes: int = 0
    weighting: str = "bow"
    notices: List[str] = field(default_factory=list)

    @staticmethod
    def _normalize(matrix: np.ndarray) -> np.ndarray:
        matrix = matrix.astype(float)
        sums = matrix.sum(axis=1, keepdims=True)
        out = np.full_like(matrix, 1.0 / matrix.shape[1])
        np.divide(matrix, sums, out=out, where=sums > 0)
        return out

    def topic_word_distribution(self, smoothed: bool = False) -> np.ndarray:
        if smoothed:
            return self._normalize(self.topic_word + self.beta)
        return self._normalize(self.topic_word)

    def doc_topic_distribution(self, smoothed: bool = False) -> np.ndarray:
        if smoothed:
            return self._normalize(self.doc_topic + self.alpha)
        return self._normalize(self.doc_topic)

    def top_word_indices(self, n: int = 10) -> List[List[int]]:
        """Top-n word indices per topic (count desc, ties by index)."""
        result = []
        for row in self.topic_word:
            order = np.lexsort((np.arange(row.size), -row))
            result.append([int(i) for i in order[:n]])
        return result

    def top_words(self, n: int = 10) -> List[List[str]]:
        return [[self.terms[i] for i in idx] for idx in self.top_word_indices(n)]

    def recount(self) -> Tuple[np.ndarray, np.ndarray]:
        """Count matrices rebuilt from the assignments."""
        return _count_matrices(self.doc_index, self.word_index, self.assignments,
                               self.doc_topic.shape[0], self.K, len(self.terms))

    def check(self) -> bool:
        ndk, nkw = self.recount()
        if not (np.array_equal(ndk, self.doc_topic) and np.array_equal(nkw, self.topic_word)):
            raise RuntimeError("Gibbs bookkeeping mismatch: count matrices differ from assignments")
        return True


def _count_matrices(doc_index, word_index, z, n_docs, n_topics, n_terms):
    ndk = np.zeros((n_docs, n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, n_terms), dtype=np.int64)
    np.add.at(ndk, (doc_index, z), 1)
    np.add.at(nkw, (z, word_index), 1)
    return ndk, nkw


def token_arrays(corpus: Corpus, weighting: str = "bow", scale: int = 10) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flatten a corpus into (doc_index, word_index) token arrays.
    Order: document, then vocabulary index, then repeat.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting}")
    counts = term_counts(corpus).tocoo()
    if weighting == "bow":
        multiplicity = counts.data.astype(np.int64)
    else:
        weights = tfidf(corpus).tocsr()
        w = np.asarray(weights[counts.row, counts.col]).ravel()
        multiplicity = np.maximum(1, np.rint(w * scale)).astype(np.int64)

    order = np.lexsort((counts.col, counts.row))
    rows, cols, mult = counts.row[order], counts.col[order], multiplicity[order]
    doc_index = np.repeat(rows.astype(np.int64), mult)
    word_index = np.repeat(cols.astype(np.int64), mult)
    return doc_index, word_index


SeedLike = Union[int, np.random.SeedSequence, None]


def train_lda(corpus: Corpus, K: int, passes: int = 500, seed: SeedLike = 0,
              weighting: str = "tfidf_scaled", alpha: Optional[float] = None, beta: float = 0.01,
              scale: int = 10, check_every: int = 50) -> TopicModel:
    """
    Collapsed Gibbs sampling over token-topic assignments.

    Args:
        K: number of topics (>= 1; K=1 gives the unigram distribution)
        passes: full sweeps over all tokens
        seed: int or SeedSequence; same seed -> identical assignments
        alpha: symmetric document prior (None -> 50 / K)
        check_every: verify count bookkeeping after every n-th sweep (0 disables)

    Raises:
        ValueError: empty corpus, K < 1
        RuntimeError: bookkeeping mismatch
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if len(corpus) == 0 or not corpus.vocabulary:
        raise ValueError("empty corpus")

    alpha = 50.0 / K if alpha is None else float(alpha)
    n_docs, n_terms = len(corpus), len(corpus.vocabulary)
    doc_index, word_index = token_arrays(corpus, weighting, scale)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=doc_index.size).astype(np.int64)
    ndk, nkw = _count_matrices(doc_index, word_index, z, n_docs, K, n_terms)
    nk = nkw.sum(axis=1).astype(np.int64)

    model = TopicModel(
        K=K, alpha=alpha, beta=beta, terms=corpus.terms,
        topic_word=nkw, doc_topic=ndk, assignments=z,
        doc_index=doc_index, word_index=word_index,
        passes=passes, weighting=weighting,
    )

    v_beta = n_terms * beta
    for sweep in range(1, passes + 1):
        uniforms = rng.random(doc_index.size)
        _gibbs_sweep(doc_index, word_index, z, ndk, nkw, nk, alpha, beta, v_beta, uniforms)
        if check_every and sweep % check_every == 0:
            model.check()

    return model


def topic_report(model: TopicModel, top: int = 40) -> pd.DataFrame:
    """rank x topic table of top stems (topics numbered from 1)."""
    words = model.top_words(top)
    data = {"rank": list(range(1, top + 1))}
    for k, topic_words in enumerate(words, start=1):
        data[f"topic_{k}"] = topic_words + [""] * (top - len(topic_words))
    return pd.DataFrame(data)
