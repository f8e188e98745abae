"""
Content mining: hashtags / mentions, text preprocessing and TF-IDF.

Preprocessing:
    lowercase -> strip URLs and @mentions -> drop '#' (keep the tag word)
    -> word tokens -> drop numbers, short tokens and stop words -> Porter stem

TF-IDF:
    weight(t, d) = tf(t, d) * ln(D / df(t)), raw term counts
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd
from nltk.stem import PorterStemmer
from nltk.tokenize import RegexpTokenizer
from scipy import sparse
from sklearn.feature_extraction.text import CountVectorizer

from core.models import TagTable, TweetRecord


HASHTAG = "hashtag"
MENTION = "mention"

HASHTAG_RE = re.compile(r"#(\w+)")
# @ preceded by a word character (e-mail addresses) is not a mention
MENTION_RE = re.compile(r"(?<!\w)@(\w+)")
URL_RE = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)

TOKENIZER = RegexpTokenizer(r"[^\W_]+")
OTHERS = "Others"


# ============================================================================
# TAGS
# ============================================================================

def extract_tags(text: str, kind: str) -> List[str]:
    """Lowercased tags without the sigil, in order, duplicates kept."""
    if kind == HASHTAG:
        pattern = HASHTAG_RE
    elif kind == MENTION:
        pattern = MENTION_RE
    else:
        raise ValueError(f"unknown tag kind '{kind}'")
    return [m.lower() for m in pattern.findall(text or "")]


def tag_table(texts: Iterable[str], kind: str) -> TagTable:
    counts: Counter = Counter()
    for text in texts:
        counts.update(extract_tags(text, kind))
    return TagTable(kind=kind, entries=dict(sorted(counts.items())))


def variant_group(table: TagTable, canonical: str = "covid19", variants: Sequence[str] = ()) -> Tuple[TagTable, float]:
    """
    Fold variant spellings into the canonical tag.

    Returns:
        (grouped table, share of the canonical group over all tags)
    """
    folded = {v.lower() for v in variants} - {canonical}
    entries: Counter = Counter()
    for tag, count in table.entries.items():
        entries[canonical if tag in folded else tag] += count
    grouped = TagTable(kind=table.kind, entries=dict(sorted(entries.items())))
    return grouped, grouped.share(canonical)


def tag_statistics(texts: Sequence[str], table: TagTable, rare_below: int = 10) -> Dict[str, float]:
    """Average tags per tweet, unique tags and the share of unique tags used fewer than `rare_below` times."""
    n_texts = len(texts)
    unique = len(table.entries)
    rare = sum(1 for c in table.entries.values() if c < rare_below)
    return {
        "kind": table.kind,
        "tweets": n_texts,
        "total": table.total,
        "per_tweet": table.total / n_texts if n_texts else 0.0,
        "unique": unique,
        "rare_share": rare / unique if unique else 0.0,
    }


def load_hashtag_categories(path) -> List[Tuple[str, str]]:
    """(category, keyword) pairs in file order; the first matching keyword wins."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Hashtag category table not found: {path}")
    table = pd.read_csv(path, dtype=str, keep_default_na=False, comment="#")
    for col in ("category", "keyword"):
        if col not in table.columns:
            raise ValueError(f"{path}: missing column '{col}'")
    return [(c.strip(), k.strip().lower()) for c, k in zip(table["category"], table["keyword"]) if k.strip()]


def categorize_tag(tag: str, categories: Sequence[Tuple[str, str]]) -> str:
    for category, keyword in categories:
        if keyword in tag:
            return category
    return OTHERS


def top_tags_frame(table: TagTable, top: int = 40, exclude: Sequence[str] = (),
                   categories: Optional[Sequence[Tuple[str, str]]] = None) -> pd.DataFrame:
    """tag, count, share (+ category) for the top tags, excluded tags left out."""
    frame = table.to_frame(exclude=list(exclude), top=top)
    if categories is not None:
        frame["category"] = [categorize_tag(t, categories) for t in frame["tag"]]
    return frame


# ============================================================================
# PREPROCESSING
# ============================================================================

def load_stopwords(path) -> Set[str]:
    """Plain text, one word per line, '#' comments allowed."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Stop-word list not found: {path}")
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return words


def preprocess(text: str, stopwords: Set[str], stemmer: Optional[PorterStemmer] = None,
               min_length: int = 2) -> List[str]:
    stemmer = stemmer or PorterStemmer()
    cleaned = URL_RE.sub(" ", (text or "").lower())
    cleaned = MENTION_RE.sub(" ", cleaned)
    cleaned = cleaned.replace("#", " ")
    tokens = []
    for token in TOKENIZER.tokenize(cleaned):
        if token.isdigit() or len(token) < min_length or token in stopwords:
            continue
        tokens.append(stemmer.stem(token))
    return tokens


@dataclass
class Corpus:
    """
    Token-list documents over a sorted vocabulary.

    vocabulary maps token -> column index; terms lists tokens by index.
    """
    documents: List[List[str]] = field(default_factory=list)
    doc_ids: List[str] = field(default_factory=list)
    vocabulary: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.vocabulary:
            terms = sorted({t for doc in self.documents for t in doc})
            self.vocabulary = {t: i for i, t in enumerate(terms)}

    @property
    def terms(self) -> List[str]:
        return sorted(self.vocabulary, key=self.vocabulary.get)

    def __len__(self) -> int:
        return len(self.documents)


def build_corpus(records: Iterable[TweetRecord], stopwords: Set[str], unique_by: str = "id",
                 min_length: int = 2) -> Tuple[Corpus, List[str]]:
    """
    One document per unique tweet (by id, or by normalized text).
    Documents empty after preprocessing are dropped with a notice.
    """
    if unique_by not in ("id", "text"):
        raise ValueError(f"unique_by must be 'id' or 'text', got {unique_by}")
    stemmer = PorterStemmer()
    documents, doc_ids = [], []
    seen: Set[str] = set()
    dropped = duplicates = 0

    for record in sorted(records, key=lambda r: r.tweet_id):
        key = record.tweet_id if unique_by == "id" else " ".join(record.text.lower().split())
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        tokens = preprocess(record.text, stopwords, stemmer, min_length)
        if not tokens:
            dropped += 1
            continue
        documents.append(tokens)
        doc_ids.append(record.tweet_id)

    notices = []
    if dropped:
        notices.append(f"{dropped} document(s) empty after preprocessing were dropped")
    if duplicates:
        notices.append(f"{duplicates} duplicate document(s) removed (unique by {unique_by})")
    return Corpus(documents=documents, doc_ids=doc_ids), notices


# ============================================================================
# TF-IDF
# ============================================================================

def _identity(doc):
    return doc


def term_counts(corpus: Corpus) -> sparse.csr_matrix:
    """D x V raw term counts."""
    vectorizer = CountVectorizer(analyzer=_identity, vocabulary=corpus.vocabulary)
    return vectorizer.transform(corpus.documents).tocsr().astype(np.int64)


def tfidf(corpus: Corpus) -> sparse.csr_matrix:
    """
    D x V TF-IDF weights. A term present in every document weighs 0.

    Raises:
        ValueError: empty corpus or empty vocabulary
    """
    if len(corpus) == 0 or not corpus.vocabulary:
        raise ValueError("empty vocabulary")
    counts = term_counts(corpus)
    n_docs = counts.shape[0]
    df = np.asarray((counts > 0).sum(axis=0)).ravel()
    idf = np.log(n_docs / np.maximum(df, 1))
    return sparse.csr_matrix(counts.multiply(idf.reshape(1, -1)), dtype=float)
