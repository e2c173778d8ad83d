# panic_forecast_tool/profile/sentiment.py
# All comments and identifiers in English

import hashlib
from typing import Dict, List, Tuple

from ..agent.prompts import render
from ..data_models.common_types import SECONDS_PER_DAY
from ..data_models.corpus_types import RawPost
from ..data_models.gateway_types import GenerationParams
from ..data_models.profile_types import SentimentTrend, DailySentiment
from ..errors import FeatureUnavailable, PanicForecastError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession
from .personality import words_of

POSITIVE = (1, 0, 0)
NEUTRAL = (0, 1, 0)
NEGATIVE = (0, 0, 1)


class SentimentClassifier:
    name = "sentiment"

    def classify(self, text: str) -> Tuple[int, int, int]:
        raise NotImplementedError


class LexiconSentimentClassifier(SentimentClassifier):
    """Sign of the summed lexicon weights; zero or a tie is neutral."""
    name = "lexicon-sentiment"

    def __init__(self, lexicon: Dict[str, float]):
        self.lexicon = lexicon

    def classify(self, text: str) -> Tuple[int, int, int]:
        total = sum(self.lexicon.get(word, 0.0) for word in words_of(text or ""))
        if total > 0:
            return POSITIVE
        if total < 0:
            return NEGATIVE
        return NEUTRAL


class LlmSentimentClassifier(SentimentClassifier):
    name = "llm-sentiment"

    def __init__(self, provider: ChatProvider, template: str, params: GenerationParams):
        self.provider = provider
        self.template = template
        self.params = params

    def classify(self, text: str) -> Tuple[int, int, int]:
        if not text:
            return NEUTRAL
        tag = "sentiment/" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
        prompt = render("sentiment", self.template, {"text": text})
        reply = AgentSession(tag, self.provider).complete(prompt, self.params)
        first = (words_of(reply) or [""])[0]
        return {"positive": POSITIVE, "negative": NEGATIVE}.get(first, NEUTRAL)


def classify_sentiment(text: str, classifier: SentimentClassifier) -> Tuple[int, int, int]:
    return classifier.classify(text)


def sentiment_trend(user_id: str, pre_posts: List[RawPost], classifier: SentimentClassifier) -> SentimentTrend:
    """Proportions over all posts plus per-day counts, day 0 being the first post's UTC day."""
    if not pre_posts:
        raise FeatureUnavailable(user_id, classifier.name, "no pre-disaster posts")
    first_day = min(p.timestamp for p in pre_posts) // SECONDS_PER_DAY
    days: Dict[int, List[int]] = {}
    totals = [0, 0, 0]
    try:
        for post in pre_posts:
            one_hot = classifier.classify(post.text)
            bucket = days.setdefault(post.timestamp // SECONDS_PER_DAY - first_day, [0, 0, 0])
            for i in range(3):
                bucket[i] += one_hot[i]
                totals[i] += one_hot[i]
    except PanicForecastError as e:
        raise FeatureUnavailable(user_id, classifier.name, str(e)) from e
    count = len(pre_posts)
    series = [DailySentiment(day, *counts) for day, counts in sorted(days.items())]
    return SentimentTrend(totals[0] / count, totals[1] / count, totals[2] / count, series)
