"""
Topic coherence (C_v style) and topic-count selection

Coherence of one topic (top-n words W):
    1. boolean sliding windows over every document (a document shorter than
       the window is a single window) -> p(w), p(wi, wj)
    2. NPMI(wi, wj) = ln[(p(wi,wj) + eps) / (p(wi) p(wj))] / -ln(p(wi,wj) + eps)
    3. v(wi) = [NPMI(wi, wj) for wj in W],  v(W) = sum of v(wi)
    4. score = mean over wi of cosine(v(wi), v(W))

Topic-count selection trains `repeats` chains per candidate K, averages the
mean coherence and picks the elbow of the curve.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from analysis.content_mining import Corpus
from analysis.lda_gibbs import TopicModel, train_lda


EPSILON = 1e-12


@dataclass
class CoherenceResult:
    per_topic: List[float]
    mean: float
    missing_words: int = 0
    n_windows: int = 0
    top_words: List[List[str]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "topic": list(range(1, len(self.per_topic) + 1)),
            "coherence": self.per_topic,
            "top_words": [" ".join(words) for words in self.top_words] or [""] * len(self.per_topic),
        })


def window_counts(documents: Sequence[Sequence[str]], words: Sequence[str],
                  window: int = 110) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Boolean sliding-window occurrence counts for a word list.

    Returns:
        (single counts (M,), joint counts (M, M), number of windows)
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    index = {w: i for i, w in enumerate(words)}
    m = len(words)
    single = np.zeros(m, dtype=np.int64)
    joint = np.zeros((m, m), dtype=np.int64)
    n_windows = 0

    for doc in documents:
        if not doc:
            continue
        ids = np.array([index.get(t, -1) for t in doc], dtype=np.int64)
        if len(doc) <= window:
            present = np.zeros((1, m), dtype=np.int64)
            present[0, ids[ids >= 0]] = 1
        else:
            onehot = np.zeros((len(doc) + 1, m), dtype=np.int64)
            positions = np.nonzero(ids >= 0)[0]
            onehot[positions + 1, ids[positions]] = 1
            cum = onehot.cumsum(axis=0)
            present = ((cum[window:] - cum[:-window]) > 0).astype(np.int64)
        n_windows += present.shape[0]
        single += present.sum(axis=0)
        joint += present.T @ present

    return single, joint, n_windows


def npmi_matrix(single: np.ndarray, joint: np.ndarray, n_windows: int) -> np.ndarray:
    """
    Pairwise NPMI in [-1, 1]. Rows/columns of words never seen are 0;
    a pair present in every window scores 1.
    """
    m = single.size
    out = np.zeros((m, m), dtype=float)
    if n_windows == 0:
        return out
    p = single / n_windows
    p_joint = joint / n_windows
    for i in range(m):
        for j in range(m):
            if single[i] == 0 or single[j] == 0:
                continue
            if joint[i, j] == n_windows:
                out[i, j] = 1.0
                continue
            pmi = np.log((p_joint[i, j] + EPSILON) / (p[i] * p[j]))
            out[i, j] = pmi / -np.log(p_joint[i, j] + EPSILON)
    return np.clip(out, -1.0, 1.0)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0:
        return 0.0
    return float(np.clip(np.dot(a, b) / norm, -1.0, 1.0))


def coherence_from_top_words(topics: Sequence[Sequence[str]], documents: Sequence[Sequence[str]],
                             window: int = 110) -> CoherenceResult:
    words = sorted({w for topic in topics for w in topic})
    single, joint, n_windows = window_counts(documents, words, window)
    npmi = npmi_matrix(single, joint, n_windows)
    index = {w: i for i, w in enumerate(words)}

    scores = []
    for topic in topics:
        ids = [index[w] for w in topic]
        vectors = npmi[np.ix_(ids, ids)]
        total = vectors.sum(axis=0)
        scores.append(float(np.mean([_cosine(v, total) for v in vectors])) if ids else 0.0)

    missing = int(sum(1 for topic in topics for w in topic if single[index[w]] == 0))
    return CoherenceResult(
        per_topic=scores,
        mean=float(np.mean(scores)) if scores else 0.0,
        missing_words=missing,
        n_windows=n_windows,
        top_words=[list(t) for t in topics],
    )


def coherence_cv(model: TopicModel, corpus: Corpus, top_n: int = 10, window: int = 110) -> CoherenceResult:
    return coherence_from_top_words(model.top_words(top_n), corpus.documents, window)


# ============================================================================
# TOPIC-COUNT SELECTION
# ============================================================================

def choose_elbow(candidates: Sequence[int], scores: Sequence[float], threshold: float = 0.05) -> int:
    """
    Smallest K whose relative gain to the next candidate is below `threshold`;
    the last candidate when the curve never flattens.
    """
    if len(candidates) != len(scores) or not candidates:
        raise ValueError("candidates and scores must be non-empty and of equal length")
    for i in range(len(candidates) - 1):
        current, following = scores[i], scores[i + 1]
        if current == 0:
            gain = np.inf if following > current else 0.0
        else:
            gain = (following - current) / abs(current)
        if gain < threshold:
            return int(candidates[i])
    return int(candidates[-1])


def chain_seed(seed: int, K: int, repeat: int) -> np.random.SeedSequence:
    """Independent stream per (K, repeat), stable under any scheduling order."""
    return np.random.SeedSequence(seed, spawn_key=(K, repeat))


def _score_chain(corpus: Corpus, K: int, repeat: int, seed: int, train_kwargs: Dict,
                 top_n: int, window: int) -> Tuple[int, int, float]:
    model = train_lda(corpus, K, seed=chain_seed(seed, K, repeat), **train_kwargs)
    return K, repeat, coherence_cv(model, corpus, top_n, window).mean


def select_topic_count(corpus: Corpus, candidates: Sequence[int], repeats: int = 10, seed: int = 0,
                       passes: int = 500, weighting: str = "tfidf_scaled", alpha: Optional[float] = None,
                       beta: float = 0.01, scale: int = 10, top_n: int = 10, window: int = 110,
                       threshold: float = 0.05, workers: int = 1) -> Tuple[int, pd.DataFrame]:
    """
    Mean coherence per candidate K over `repeats` seeded chains, then the elbow.

    Returns:
        (chosen K, curve K, mean_coherence, std_coherence, repeats)

    Raises:
        ValueError: candidates empty or not sorted ascending
    """
    candidates = [int(k) for k in candidates]
    if not candidates:
        raise ValueError("no topic-count candidates")
    if candidates != sorted(set(candidates)):
        raise ValueError(f"topic-count candidates must be sorted ascending and unique: {candidates}")

    train_kwargs = dict(passes=passes, weighting=weighting, alpha=alpha, beta=beta, scale=scale)
    jobs = [(K, r) for K in candidates for r in range(repeats)]
    results = Parallel(n_jobs=workers, prefer="threads")(
        delayed(_score_chain)(corpus, K, r, seed, train_kwargs, top_n, window) for K, r in jobs
    )

    by_k: Dict[int, List[float]] = {K: [] for K in candidates}
    for K, _, score in sorted(results):
        by_k[K].append(score)
    curve = pd.DataFrame({
        "K": candidates,
        "mean_coherence": [float(np.mean(by_k[K])) for K in candidates],
        "std_coherence": [float(np.std(by_k[K])) for K in candidates],
        "repeats": [len(by_k[K]) for K in candidates],
    })

    if len(candidates) == 1:
        return candidates[0], curve
    return choose_elbow(candidates, curve["mean_coherence"].tolist(), threshold), curve
