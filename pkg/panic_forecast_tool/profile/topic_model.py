# panic_forecast_tool/profile/topic_model.py
# All comments and identifiers in English

import hashlib
import json
import logging
import re
from typing import List, Dict, Any, Optional, Iterable, FrozenSet

import numpy as np

from ..data_models.profile_types import TopicDistribution
from ..errors import InsufficientData

logger = logging.getLogger(__name__)

LDA_TOKEN_RE = re.compile(r"[a-z][a-z']+")


def tokenize_for_topics(text: str, stopwords: FrozenSet[str]) -> List[str]:
    return [t for t in LDA_TOKEN_RE.findall((text or "").lower()) if t not in stopwords]


def _draw(weights: np.ndarray, u: float) -> int:
    cdf = np.cumsum(weights)
    k = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(k, len(weights) - 1)


class TopicModel:
    """
    Collapsed-Gibbs LDA state: vocabulary plus topic-word and doc-topic
    counts. phi and the document mixtures are derived from the counts.
    """

    def __init__(self,
                 vocabulary: List[str],
                 topic_word_counts: np.ndarray,
                 doc_topic_counts: np.ndarray,
                 alpha: float,
                 beta: float,
                 seed: int,
                 iterations: int,
                 keywords_per_topic: int = 10):
        self.vocabulary: List[str] = list(vocabulary)
        self.word_index: Dict[str, int] = {w: i for i, w in enumerate(self.vocabulary)}
        self.topic_word_counts: np.ndarray = np.asarray(topic_word_counts, dtype=np.int64)
        self.doc_topic_counts: np.ndarray = np.asarray(doc_topic_counts, dtype=np.int64)
        if self.topic_word_counts.shape[1] != len(self.vocabulary):
            raise ValueError("topic_word_counts must have one column per vocabulary word.")
        self.alpha: float = float(alpha)
        self.beta: float = float(beta)
        self.seed: int = int(seed)
        self.iterations: int = int(iterations)
        self.keywords_per_topic: int = int(keywords_per_topic)

    @property
    def topic_count(self) -> int:
        return self.topic_word_counts.shape[0]

    def phi(self) -> np.ndarray:
        vocab_size = len(self.vocabulary)
        counts = self.topic_word_counts + self.beta
        return counts / (self.topic_word_counts.sum(axis=1, keepdims=True) + vocab_size * self.beta)

    def document_mixtures(self) -> np.ndarray:
        counts = self.doc_topic_counts + self.alpha
        return counts / counts.sum(axis=1, keepdims=True)

    def top_keywords(self, n: Optional[int] = None) -> List[List[str]]:
        n = n or self.keywords_per_topic
        phi = self.phi()
        keywords = []
        for row in phi:
            order = np.argsort(-row, kind="stable")[:n]
            keywords.append([self.vocabulary[i] for i in order])
        return keywords

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vocabulary": self.vocabulary,
            "topicWordCounts": self.topic_word_counts.tolist(),
            "docTopicCounts": self.doc_topic_counts.tolist(),
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "iterations": self.iterations,
            "keywordsPerTopic": self.keywords_per_topic,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TopicModel':
        topic_word = np.asarray(data["topicWordCounts"], dtype=np.int64)
        doc_topic = np.asarray(data.get("docTopicCounts", []), dtype=np.int64)
        if doc_topic.size == 0:
            doc_topic = doc_topic.reshape(0, topic_word.shape[0])
        return cls(
            vocabulary=data["vocabulary"],
            topic_word_counts=topic_word,
            doc_topic_counts=doc_topic,
            alpha=data["alpha"],
            beta=data["beta"],
            seed=data["seed"],
            iterations=data["iterations"],
            keywords_per_topic=data.get("keywordsPerTopic", 10),
        )


def model_cache_key(documents: Iterable[str], k: int, iterations: int, seed: int,
                    alpha: float, beta: float, stopwords: FrozenSet[str]) -> str:
    """SHA-256 over the sorted corpus text, the stopword list and the hyperparameters."""
    payload = {
        "documents": sorted(documents),
        "stopwords": sorted(stopwords),
        "k": k, "iterations": iterations, "seed": seed, "alpha": alpha, "beta": beta,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def fit_lda(documents: List[str],
            k: int = 25,
            keywords_per_topic: int = 10,
            iterations: int = 500,
            seed: int = 0,
            alpha: Optional[float] = None,
            beta: float = 0.01,
            stopwords: FrozenSet[str] = frozenset()) -> TopicModel:
    """
    Fits LDA by collapsed Gibbs sampling. One sequential chain driven by
    `np.random.default_rng(seed)`, so the result is a function of its inputs.
    """
    if k < 2:
        raise ValueError("k must be >= 2.")
    if not documents:
        raise InsufficientData("Cannot fit a topic model on an empty corpus.")
    alpha = 50.0 / k if alpha is None else float(alpha)

    tokenized = [tokenize_for_topics(doc, stopwords) for doc in documents]
    vocabulary = sorted({t for doc in tokenized for t in doc})
    if not vocabulary:
        raise InsufficientData("Vocabulary is empty after stopword removal.")
    index = {w: i for i, w in enumerate(vocabulary)}

    word_ids = np.array([index[t] for doc in tokenized for t in doc], dtype=np.int64)
    doc_ids = np.array([d for d, doc in enumerate(tokenized) for _ in doc], dtype=np.int64)
    vocab_size = len(vocabulary)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=len(word_ids))
    n_kw = np.zeros((k, vocab_size), dtype=np.int64)
    n_dk = np.zeros((len(tokenized), k), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    np.add.at(n_kw, (z, word_ids), 1)
    np.add.at(n_dk, (doc_ids, z), 1)
    np.add.at(n_k, z, 1)

    for _ in range(iterations):
        draws = rng.random(len(word_ids))
        for i in range(len(word_ids)):
            w, d, topic = word_ids[i], doc_ids[i], z[i]
            n_kw[topic, w] -= 1
            n_dk[d, topic] -= 1
            n_k[topic] -= 1
            conditional = (n_kw[:, w] + beta) / (n_k + vocab_size * beta) * (n_dk[d] + alpha)
            topic = _draw(conditional, draws[i])
            z[i] = topic
            n_kw[topic, w] += 1
            n_dk[d, topic] += 1
            n_k[topic] += 1

    logger.info("Fitted LDA: %d topics, %d documents, %d tokens, vocabulary %d",
                k, len(tokenized), len(word_ids), vocab_size)
    return TopicModel(vocabulary, n_kw, n_dk, alpha, beta, seed, iterations, keywords_per_topic)


def _fold_in(model: TopicModel, word_ids: List[int], phi: np.ndarray, iterations: int,
             rng: np.random.Generator) -> np.ndarray:
    k = model.topic_count
    z = rng.integers(0, k, size=len(word_ids))
    n_dk = np.bincount(z, minlength=k)
    for _ in range(iterations):
        draws = rng.random(len(word_ids))
        for i, w in enumerate(word_ids):
            n_dk[z[i]] -= 1
            topic = _draw(phi[:, w] * (n_dk + model.alpha), draws[i])
            z[i] = topic
            n_dk[topic] += 1
    return n_dk


def infer_topics(model: TopicModel, posts: List[str], stopwords: FrozenSet[str] = frozenset(),
                 iterations: int = 50, seed: int = 0) -> TopicDistribution:
    """
    Folds each post into the fitted model with phi held fixed and labels it
    with its most likely topic (ties to the lower index). Theta is the
    share of posts per label. A user with no in-vocabulary post gets a
    uniform Theta flagged out-of-vocabulary.
    """
    phi = model.phi()
    rng = np.random.default_rng(seed)
    labels = np.zeros(model.topic_count)
    for text in posts:
        word_ids = [model.word_index[t] for t in tokenize_for_topics(text, stopwords) if t in model.word_index]
        if not word_ids:
            continue
        counts = _fold_in(model, word_ids, phi, iterations, rng)
        labels[int(np.argmax(counts))] += 1
    if labels.sum() == 0:
        logger.warning("All %d posts are out of the topic vocabulary; using a uniform topic distribution",
                       len(posts))
        return TopicDistribution.uniform(model.topic_count)
    theta = labels / labels.sum()
    theta[-1] = 1.0 - theta[:-1].sum()
    return TopicDistribution(theta.tolist())

