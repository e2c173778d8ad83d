# panic_forecast_tool/corpus/text_cleaning.py
# All comments and identifiers in English

import re
from typing import List, Tuple

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from ..data_models.corpus_types import RawPost

URL_RE = re.compile(r'(?:https?://|www\.)\S+', re.IGNORECASE)
RETWEET_RE = re.compile(r'^\s*RT\s+@\w+:\s*')
NON_ALNUM_RE = re.compile(r'[\W_]+')
TOKEN_PATTERN = r"(?u)\b\w+\b"

DEFAULT_DEDUP_THRESHOLD = 0.85


def sanitize_text(text: str) -> str:
    """
    Strips a leading "RT @handle:" marker and URLs, then collapses every run
    of non-alphanumeric characters to a single space.
    """
    if not text:
        return ""
    text = RETWEET_RE.sub("", text, count=1)
    text = URL_RE.sub(" ", text)
    text = NON_ALNUM_RE.sub(" ", text)
    return text.strip()


def meaningful_token_count(text: str) -> int:
    """Whitespace tokens with at least two alphabetic characters."""
    return sum(1 for token in text.split() if sum(ch.isalpha() for ch in token) >= 2)


def _similarity_matrix(texts: List[str]) -> np.ndarray:
    """
    Pairwise cosine similarity of raw lowercased term frequencies. Two empty
    texts count as identical.
    """
    n = len(texts)
    empty = np.array([not re.search(TOKEN_PATTERN, t) for t in texts], dtype=bool)
    if empty.all():
        return np.ones((n, n))
    vectorizer = CountVectorizer(lowercase=True, token_pattern=TOKEN_PATTERN)
    counts = vectorizer.fit_transform(texts)
    similarity = cosine_similarity(counts)
    similarity[np.ix_(empty, empty)] = 1.0
    return similarity


def near_duplicate(a: str, b: str, threshold: float = DEFAULT_DEDUP_THRESHOLD) -> bool:
    return bool(_similarity_matrix([a, b])[0, 1] > threshold)


def dedup_corpus(posts: List[RawPost],
                 threshold: float = DEFAULT_DEDUP_THRESHOLD) -> Tuple[List[RawPost], List[Tuple[str, str]]]:
    """
    Greedy per-user near-duplicate removal. Posts are scanned in the given
    (timestamp) order; a post is dropped when it matches an already kept post
    of the same user. Returns (kept, [(dropped_id, retained_id), ...]).
    """
    by_user = {}
    for index, post in enumerate(posts):
        by_user.setdefault(post.user_id, []).append(index)

    dropped_ids = {}
    for indices in by_user.values():
        similarity = _similarity_matrix([posts[i].text for i in indices])
        kept_local: List[int] = []
        for local, _ in enumerate(indices):
            match = next((k for k in kept_local if similarity[local, k] > threshold), None)
            if match is None:
                kept_local.append(local)
            else:
                dropped_ids[indices[local]] = posts[indices[match]].post_id

    kept = [post for i, post in enumerate(posts) if i not in dropped_ids]
    dropped = [(posts[i].post_id, retained) for i, retained in sorted(dropped_ids.items())]
    return kept, dropped
