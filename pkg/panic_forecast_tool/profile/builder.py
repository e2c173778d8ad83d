# panic_forecast_tool/profile/builder.py
# All comments and identifiers in English

import logging
import zlib
from typing import Callable, FrozenSet, List, Optional, Sequence

import numpy as np

from ..data_models.common_types import SECONDS_PER_DAY
from ..data_models.agent_types import DisasterContext
from ..data_models.corpus_types import RawPost, UserTimeline
from ..data_models.profile_types import RiskCommFeatures, ThemeMembership, ToneTriple, UserProfile
from ..errors import FeatureUnavailable, ToneUnavailable
from .personality import PersonalityScorer, score_personality
from .retrieval import DEFAULT_QUERY_TERMS, retrieve_relevant
from .sentiment import SentimentClassifier, sentiment_trend
from .themes import theme_profile
from .topic_model import TopicModel, infer_topics

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088

FLAG_PERSONALITY = "personality_unavailable"
FLAG_SENTIMENT = "sentiment_unavailable"
FLAG_TOPICS_OOV = "topics_out_of_vocabulary"
FLAG_TONE = "tone_unavailable"
FLAG_LOCATION = "location_unavailable"


def haversine_km(lat1: float, lon1: float, lat2, lon2) -> np.ndarray:
    """Great-circle distance; `lat2`/`lon2` may be arrays."""
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    d_phi = phi2 - phi1
    d_lambda = np.radians(lon2) - np.radians(lon1)
    a = np.sin(d_phi / 2) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(d_lambda / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def distance_to_track(latitude: float, longitude: float, context: DisasterContext) -> Optional[float]:
    if context is None or context.is_empty:
        return None
    lats = np.array([row.latitude for row in context.rows])
    lons = np.array([row.longitude for row in context.rows])
    return float(np.min(haversine_km(latitude, longitude, lats, lons)))


def posts_per_day(pre_posts: List[RawPost], observation_days: Optional[float] = None) -> float:
    """
    Posts divided by the configured observation window in days. Without a
    window the divisor is the user's own first-to-last post span, at least
    one day. Posts must be in timestamp order.
    """
    if not pre_posts:
        return 0.0
    if observation_days:
        days = float(observation_days)
    else:
        span = (pre_posts[-1].timestamp - pre_posts[0].timestamp) / SECONDS_PER_DAY
        days = max(1.0, span)
    return len(pre_posts) / days


class ProfileScorers:
    """The feature extractors `build_profile` runs for every user."""

    def __init__(self,
                 personality: PersonalityScorer,
                 sentiment: SentimentClassifier,
                 topic_model: Optional[TopicModel] = None,
                 theme_membership: Optional[ThemeMembership] = None,
                 stopwords: FrozenSet[str] = frozenset(),
                 tone: Optional[Callable[[str, List[RawPost]], ToneTriple]] = None,
                 query_terms: Sequence[str] = DEFAULT_QUERY_TERMS,
                 inference_iterations: int = 50,
                 seed: int = 0):
        self.personality = personality
        self.sentiment = sentiment
        self.topic_model = topic_model
        self.theme_membership = theme_membership
        self.stopwords = stopwords
        self.tone = tone
        self.query_terms = tuple(query_terms)
        self.inference_iterations = inference_iterations
        self.seed = seed

    def user_seed(self, user_id: str) -> int:
        return (self.seed ^ zlib.crc32(user_id.encode("utf-8"))) & 0xFFFFFFFF


def build_profile(timeline: UserTimeline, disaster_context: Optional[DisasterContext], scorers: ProfileScorers,
                  observation_days: Optional[float] = None) -> UserProfile:
    """
    Runs every extractor on the pre-disaster posts. A failing extractor
    leaves its feature empty and adds a flag; it never aborts the user.
    """
    user_id = timeline.user_id
    posts = timeline.pre_posts
    flags: List[str] = []

    try:
        personality = score_personality(user_id, posts, scorers.personality)
    except FeatureUnavailable as e:
        logger.warning("%s", e)
        personality = None
        flags.append(FLAG_PERSONALITY)

    try:
        trend = sentiment_trend(user_id, posts, scorers.sentiment)
    except FeatureUnavailable as e:
        logger.warning("%s", e)
        trend = None
        flags.append(FLAG_SENTIMENT)

    topic_distribution = None
    themes = None
    if scorers.topic_model is not None:
        topic_distribution = infer_topics(scorers.topic_model, [p.text for p in posts], scorers.stopwords,
                                          scorers.inference_iterations, scorers.user_seed(user_id))
        if topic_distribution.out_of_vocabulary:
            flags.append(FLAG_TOPICS_OOV)
        if scorers.theme_membership is not None:
            themes = theme_profile(scorers.theme_membership, topic_distribution)

    tone = None
    if scorers.tone is None:
        flags.append(FLAG_TONE)
    else:
        try:
            tone = scorers.tone(user_id, posts)
        except ToneUnavailable:
            flags.append(FLAG_TONE)

    distance = None
    geotagged = [p for p in posts if p.has_coordinates]
    if geotagged:
        latest = geotagged[-1]
        distance = distance_to_track(latest.latitude, latest.longitude, disaster_context)
    if distance is None:
        flags.append(FLAG_LOCATION)

    network = timeline.latest_network_counts()
    risk_comm = RiskCommFeatures(network["follower_count"], network["followee_count"],
                                 posts_per_day(posts, observation_days), distance)
    relevant = [p.text for p in retrieve_relevant(posts, scorers.query_terms, k=5)]

    return UserProfile(user_id, personality, trend, themes, tone, risk_comm, relevant, topic_distribution, flags)
