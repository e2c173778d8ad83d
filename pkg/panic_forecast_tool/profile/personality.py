# panic_forecast_tool/profile/personality.py
# All comments and identifiers in English

import logging
import re
from typing import Dict, List, Optional, Tuple

import requests

from ..agent.prompts import render
from ..data_models.common_types import BIG_FIVE_TRAITS
from ..data_models.corpus_types import RawPost
from ..data_models.gateway_types import GenerationParams
from ..data_models.profile_types import PersonalityVector
from ..errors import FeatureUnavailable, InsufficientData, RetryableParseError, PanicForecastError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession

logger = logging.getLogger(__name__)

WORD_RE = re.compile(r"[^\W\d_]+")
TRAIT_LINE_RE = re.compile(r"^\W*(openness|conscientiousness|extraversion|agreeableness|neuroticism)\W*[:=]\s*"
                           r"([01](?:\.\d+)?)", re.IGNORECASE | re.MULTILINE)


def words_of(text: str) -> List[str]:
    return WORD_RE.findall(text.lower())


class PersonalityScorer:
    name = "personality"

    def score(self, user_id: str, texts: List[str]) -> PersonalityVector:
        raise NotImplementedError


class LexiconPersonalityScorer(PersonalityScorer):
    """
    Each trait is 0.5 + 0.5 * (mean weight of the lexicon words hit for that
    trait); traits without hits stay at the neutral 0.5.
    """
    name = "lexicon-personality"

    def __init__(self, lexicon: Dict[str, Dict[str, float]]):
        self.lexicon = lexicon

    def score(self, user_id: str, texts: List[str]) -> PersonalityVector:
        hits: Dict[str, List[float]] = {trait: [] for trait in BIG_FIVE_TRAITS}
        for text in texts:
            for word in words_of(text):
                for trait, weight in self.lexicon.get(word, {}).items():
                    hits[trait].append(weight)
        values = {}
        for trait in BIG_FIVE_TRAITS:
            if hits[trait]:
                mean = sum(hits[trait]) / len(hits[trait])
                values[trait] = min(1.0, max(0.0, 0.5 + 0.5 * mean))
            else:
                values[trait] = 0.5
        return PersonalityVector(**values)


def parse_trait_lines(text: str) -> PersonalityVector:
    found = {m.group(1).lower(): float(m.group(2)) for m in TRAIT_LINE_RE.finditer(text or "")}
    missing = [t for t in BIG_FIVE_TRAITS if t not in found]
    if missing:
        raise RetryableParseError(f"Personality reply lacks traits {missing}")
    if any(not 0.0 <= v <= 1.0 for v in found.values()):
        raise RetryableParseError("Personality scores must be in [0, 1]")
    return PersonalityVector(**{t: found[t] for t in BIG_FIVE_TRAITS})


class LlmPersonalityScorer(PersonalityScorer):
    name = "llm-personality"

    def __init__(self, provider: ChatProvider, template: str, retry_template: str, params: GenerationParams):
        self.provider = provider
        self.template = template
        self.retry_template = retry_template
        self.params = params

    def score(self, user_id: str, texts: List[str]) -> PersonalityVector:
        session = AgentSession(f"{user_id}/personality", self.provider)
        posts = "\n".join(f"- {t}" for t in texts)
        reply = session.complete(render("personality", self.template, {"posts": posts}), self.params)
        try:
            return parse_trait_lines(reply)
        except RetryableParseError:
            return parse_trait_lines(session.complete(self.retry_template, self.params))


class ExternalPersonalityScorer(PersonalityScorer):
    """POST {"texts": [...]} -> {"openness": 0.4, ...}"""
    name = "external-personality"

    def __init__(self, url: str, timeout_seconds: float = 60.0, http_session: Optional[requests.Session] = None):
        self.url = url
        self.timeout_seconds = timeout_seconds
        self._http = http_session or requests.Session()

    def score(self, user_id: str, texts: List[str]) -> PersonalityVector:
        response = self._http.post(self.url, json={"texts": texts}, timeout=self.timeout_seconds)
        response.raise_for_status()
        return PersonalityVector.from_dict(response.json())


def score_personality(user_id: str, pre_posts: List[RawPost], scorer: PersonalityScorer) -> PersonalityVector:
    if not pre_posts:
        raise FeatureUnavailable(user_id, scorer.name, "no pre-disaster posts")
    try:
        return scorer.score(user_id, [p.text for p in pre_posts])
    except (PanicForecastError, requests.RequestException, ValueError, KeyError) as e:
        raise FeatureUnavailable(user_id, scorer.name, str(e)) from e


def check_personality_consistency(user_id: str, pre_posts: List[RawPost], scorer: PersonalityScorer,
                                  float_range: float = 0.15) -> Tuple[bool, Dict[str, float]]:
    """
    Scores the alternating halves of the posts separately; consistent when
    no trait moves by more than `float_range`.
    """
    if len(pre_posts) < 2:
        raise InsufficientData(f"User '{user_id}' needs at least 2 posts for a consistency check.")
    first = score_personality(user_id, pre_posts[0::2], scorer)
    second = score_personality(user_id, pre_posts[1::2], scorer)
    deltas = {trait: abs(getattr(first, trait) - getattr(second, trait)) for trait in BIG_FIVE_TRAITS}
    consistent = all(delta <= float_range + 1e-12 for delta in deltas.values())
    return consistent, deltas
