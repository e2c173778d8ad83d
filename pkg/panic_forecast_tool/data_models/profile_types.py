# panic_forecast_tool/data_models/profile_types.py
# All comments and identifiers in English

from typing import List, Dict, Any, Optional, Sequence, Tuple

import numpy as np

from .common_types import BIG_FIVE_TRAITS, THEME_NAMES

SIMPLEX_TOLERANCE = 1e-9


def _check_simplex(name: str, weights: Sequence[float]) -> None:
    if any(w < -SIMPLEX_TOLERANCE for w in weights):
        raise ValueError(f"{name} has negative components.")
    total = float(sum(weights))
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise ValueError(f"{name} must sum to 1, got {total!r}.")


class PersonalityVector:
    """Big Five traits, each a fraction in [0, 1]."""
    def __init__(self,
                 openness: float = 0.5,
                 conscientiousness: float = 0.5,
                 extraversion: float = 0.5,
                 agreeableness: float = 0.5,
                 neuroticism: float = 0.5):
        values = dict(openness=openness, conscientiousness=conscientiousness, extraversion=extraversion,
                      agreeableness=agreeableness, neuroticism=neuroticism)
        for trait, value in values.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Personality trait '{trait}' must be in [0, 1], got {value}.")
        self.openness: float = float(openness)
        self.conscientiousness: float = float(conscientiousness)
        self.extraversion: float = float(extraversion)
        self.agreeableness: float = float(agreeableness)
        self.neuroticism: float = float(neuroticism)

    @classmethod
    def neutral(cls) -> 'PersonalityVector':
        return cls()

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, trait) for trait in BIG_FIVE_TRAITS)

    def __eq__(self, other) -> bool:
        return isinstance(other, PersonalityVector) and self.as_tuple() == other.as_tuple()

    def __repr__(self) -> str:
        return "PersonalityVector(" + ", ".join(f"{t}={getattr(self, t):.3f}" for t in BIG_FIVE_TRAITS) + ")"

    def to_dict(self) -> Dict[str, Any]:
        return {trait: getattr(self, trait) for trait in BIG_FIVE_TRAITS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PersonalityVector':
        return cls(**{trait: float(data.get(trait, 0.5)) for trait in BIG_FIVE_TRAITS})


class DailySentiment:
    def __init__(self, day_index: int, positive: int, neutral: int, negative: int):
        self.day_index: int = day_index
        self.positive: int = positive
        self.neutral: int = neutral
        self.negative: int = negative

    @property
    def total(self) -> int:
        return self.positive + self.neutral + self.negative

    def to_dict(self) -> Dict[str, Any]:
        return {"day": self.day_index, "pos": self.positive, "neu": self.neutral, "neg": self.negative}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DailySentiment':
        return cls(int(data["day"]), int(data["pos"]), int(data["neu"]), int(data["neg"]))


class SentimentTrend:
    """
    Ternary sentiment proportions over the pre-disaster posts plus the
    per-day counts they were aggregated from.
    """
    def __init__(self, positive: float, neutral: float, negative: float,
                 daily_series: Optional[List[DailySentiment]] = None):
        self.positive: float = positive
        self.neutral: float = neutral
        self.negative: float = negative
        self.daily_series: List[DailySentiment] = daily_series if daily_series is not None else []
        if self.post_count > 0:
            _check_simplex("SentimentTrend proportions", (positive, neutral, negative))

    @property
    def post_count(self) -> int:
        return sum(day.total for day in self.daily_series)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pos": self.positive,
            "neu": self.neutral,
            "neg": self.negative,
            "dailySeries": [d.to_dict() for d in self.daily_series],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SentimentTrend':
        return cls(
            positive=float(data["pos"]),
            neutral=float(data["neu"]),
            negative=float(data["neg"]),
            daily_series=[DailySentiment.from_dict(d) for d in data.get("dailySeries", [])],
        )


class TopicDistribution:
    """Per-user topic weights over the fitted LDA topics."""
    def __init__(self, weights: Sequence[float], out_of_vocabulary: bool = False):
        _check_simplex("TopicDistribution", weights)
        self.weights: List[float] = [float(w) for w in weights]
        self.out_of_vocabulary: bool = out_of_vocabulary

    @classmethod
    def uniform(cls, k: int) -> 'TopicDistribution':
        return cls([1.0 / k] * k, out_of_vocabulary=True)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {"weights": self.weights, "outOfVocabulary": self.out_of_vocabulary}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TopicDistribution':
        return cls(data["weights"], bool(data.get("outOfVocabulary", False)))


class ThemeMembership:
    """
    Gamma: an 8 x k column-stochastic matrix assigning every LDA topic to one
    of the consolidated themes.
    """
    def __init__(self, matrix: Sequence[Sequence[float]], theme_names: Sequence[str] = THEME_NAMES):
        gamma = np.asarray(matrix, dtype=float)
        if gamma.ndim != 2 or gamma.shape[0] != len(THEME_NAMES):
            raise ValueError(f"ThemeMembership must have {len(THEME_NAMES)} rows, got shape {gamma.shape}.")
        if tuple(theme_names) != THEME_NAMES:
            raise ValueError("theme_names must be exactly the eight consolidated themes in order.")
        if np.any(gamma < 0) or not np.allclose(gamma.sum(axis=0), 1.0, atol=SIMPLEX_TOLERANCE):
            raise ValueError("Every ThemeMembership column must be non-negative and sum to 1.")
        self.matrix: np.ndarray = gamma
        self.theme_names: Tuple[str, ...] = tuple(theme_names)

    @classmethod
    def from_assignments(cls, assignments: Sequence[int]) -> 'ThemeMembership':
        """Builds one-hot columns from a theme index per topic."""
        gamma = np.zeros((len(THEME_NAMES), len(assignments)))
        for topic, theme in enumerate(assignments):
            gamma[theme, topic] = 1.0
        return cls(gamma)

    @property
    def topic_count(self) -> int:
        return self.matrix.shape[1]

    def assignments(self) -> List[int]:
        return [int(i) for i in np.argmax(self.matrix, axis=0)]

    def to_dict(self) -> Dict[str, Any]:
        return {"themeNames": list(self.theme_names), "matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ThemeMembership':
        return cls(data["matrix"], data.get("themeNames", THEME_NAMES))


class ThemeProfile:
    """tau: the user's weight on each of the eight themes."""
    def __init__(self, weights: Sequence[float], top_themes: Sequence[str]):
        _check_simplex("ThemeProfile", weights)
        self.weights: List[float] = [float(w) for w in weights]
        self.top_themes: List[str] = list(top_themes)

    def to_dict(self) -> Dict[str, Any]:
        return {"weights": self.weights, "topThemes": self.top_themes}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ThemeProfile':
        return cls(data["weights"], data.get("topThemes", []))


class ToneTriple:
    def __init__(self, first: str, second: str, third: str):
        words = [w.strip() for w in (first, second, third)]
        if any(not w for w in words):
            raise ValueError("ToneTriple needs exactly three non-empty words.")
        self.words: Tuple[str, str, str] = (words[0], words[1], words[2])

    def __eq__(self, other) -> bool:
        return isinstance(other, ToneTriple) and self.words == other.words

    def __repr__(self) -> str:
        return f"ToneTriple{self.words}"

    def to_dict(self) -> List[str]:
        return list(self.words)

    @classmethod
    def from_dict(cls, data: Sequence[str]) -> 'ToneTriple':
        if len(data) != 3:
            raise ValueError("ToneTriple needs exactly three words.")
        return cls(*data)


class RiskCommFeatures:
    def __init__(self, follower_count: int, followee_count: int, posts_per_day: float,
                 distance_to_track_km: Optional[float] = None):
        if posts_per_day < 0:
            raise ValueError("posts_per_day must be non-negative.")
        if distance_to_track_km is not None and distance_to_track_km < 0:
            raise ValueError("distance_to_track_km must be non-negative.")
        self.follower_count: int = follower_count
        self.followee_count: int = followee_count
        self.posts_per_day: float = posts_per_day
        self.distance_to_track_km: Optional[float] = distance_to_track_km

    def to_dict(self) -> Dict[str, Any]:
        return {
            "followerCount": self.follower_count,
            "followeeCount": self.followee_count,
            "postsPerDay": self.posts_per_day,
            "distanceToTrackKm": self.distance_to_track_km,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RiskCommFeatures':
        return cls(
            follower_count=int(data.get("followerCount", 0)),
            followee_count=int(data.get("followeeCount", 0)),
            posts_per_day=float(data.get("postsPerDay", 0.0)),
            distance_to_track_km=data.get("distanceToTrackKm"),
        )


class UserProfile:
    """
    Cognitive-domain features of one user. Sub-features that could not be
    extracted are left as None and named in `flags`.
    """
    def __init__(self,
                 user_id: str,
                 personality: Optional[PersonalityVector],
                 sentiment_trend: Optional[SentimentTrend],
                 theme_profile: Optional[ThemeProfile],
                 tone: Optional[ToneTriple],
                 risk_comm: RiskCommFeatures,
                 relevant_posts: Optional[List[str]] = None,
                 topic_distribution: Optional[TopicDistribution] = None,
                 flags: Optional[List[str]] = None):
        if not user_id:
            raise ValueError("user_id cannot be empty.")
        self.user_id: str = user_id
        self.personality: Optional[PersonalityVector] = personality
        self.sentiment_trend: Optional[SentimentTrend] = sentiment_trend
        self.theme_profile: Optional[ThemeProfile] = theme_profile
        self.tone: Optional[ToneTriple] = tone
        self.risk_comm: RiskCommFeatures = risk_comm
        self.relevant_posts: List[str] = list(relevant_posts or [])[:5]
        self.topic_distribution: Optional[TopicDistribution] = topic_distribution
        self.flags: List[str] = sorted(set(flags or []))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "userId": self.user_id,
            "personality": self.personality.to_dict() if self.personality else None,
            "sentimentTrend": self.sentiment_trend.to_dict() if self.sentiment_trend else None,
            "themeProfile": self.theme_profile.to_dict() if self.theme_profile else None,
            "topicDistribution": self.topic_distribution.to_dict() if self.topic_distribution else None,
            "tone": self.tone.to_dict() if self.tone else None,
            "riskComm": self.risk_comm.to_dict(),
            "relevantPosts": self.relevant_posts,
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UserProfile':
        user_id = data.get("userId")
        if not user_id:
            raise ValueError("userId is required for UserProfile.")

        def _opt(key, model_cls):
            value = data.get(key)
            return model_cls.from_dict(value) if value is not None else None

        return cls(
            user_id=user_id,
            personality=_opt("personality", PersonalityVector),
            sentiment_trend=_opt("sentimentTrend", SentimentTrend),
            theme_profile=_opt("themeProfile", ThemeProfile),
            tone=_opt("tone", ToneTriple),
            risk_comm=RiskCommFeatures.from_dict(data.get("riskComm", {})),
            relevant_posts=data.get("relevantPosts", []),
            topic_distribution=_opt("topicDistribution", TopicDistribution),
            flags=data.get("flags", []),
        )
