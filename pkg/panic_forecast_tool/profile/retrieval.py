# panic_forecast_tool/profile/retrieval.py
# All comments and identifiers in English

from typing import List, Sequence

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer

from ..data_models.corpus_types import RawPost

# Terms of the hurricane-relevance annotation prompt.
DEFAULT_QUERY_TERMS = (
    "sandy", "hurricane", "storm", "superstorm", "tropical", "cyclone", "winds", "fierce",
    "rainfall", "flooding", "flood", "power", "outages", "evacuation", "surge", "landfall",
)
RETRIEVAL_TOKEN_PATTERN = r"(?u)\b[a-zA-Z][a-zA-Z']+\b"


def retrieve_relevant(pre_posts: List[RawPost], query_terms: Sequence[str] = DEFAULT_QUERY_TERMS,
                      k: int = 5) -> List[RawPost]:
    """
    Scores each post by the summed TF-IDF weight of the query terms (IDF over
    the user's own posts). Posts scoring zero are dropped; ties go to the
    more recent post.
    """
    vocabulary = sorted({t.lower() for t in query_terms if t.strip()})
    if not vocabulary:
        raise ValueError("query_terms cannot be empty.")
    if not pre_posts:
        return []
    vectorizer = TfidfVectorizer(vocabulary=vocabulary, lowercase=True, norm=None,
                                 token_pattern=RETRIEVAL_TOKEN_PATTERN)
    matrix = vectorizer.fit_transform([p.text for p in pre_posts])
    scores = np.asarray(matrix.sum(axis=1)).ravel()
    ranked = sorted((i for i in range(len(pre_posts)) if scores[i] > 0),
                    key=lambda i: (-scores[i], -pre_posts[i].timestamp, pre_posts[i].post_id))
    return [pre_posts[i] for i in ranked[:k]]
