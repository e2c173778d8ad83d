# panic_forecast_tool/data_models/agent_types.py
# All comments and identifiers in English

from typing import List, Dict, Any, Optional

from .common_types import Subscale, ProbabilitySource, OutcomeStatus

PPDTS_ITEM_COUNT = 18
AROUSAL_FACTOR_NAMES = ("awareness", "coping", "uncertainty", "novelty")
EXPERT_NAMES = ("psychological", "linguistic", "factual", "emotional")

KNOWLEDGE_SECTIONS = (
    "Public Risk Perception Formation",
    "Personality Traits and Risk Response",
    "Social Media Language Style Effects",
    "Content Type Emotional Impacts",
    "Emotional Stability Mechanisms",
    "Social Media Network Property Roles",
)


class PsychKnowledge:
    """The six-section psychology knowledge base injected at stage 1."""
    def __init__(self, sections: Dict[str, str]):
        missing = [name for name in KNOWLEDGE_SECTIONS if not sections.get(name, "").strip()]
        if missing:
            raise ValueError(f"Psychological knowledge sections missing or empty: {missing}")
        self.sections: Dict[str, str] = {name: sections[name].strip() for name in KNOWLEDGE_SECTIONS}

    def render(self) -> str:
        return "\n".join(f"{name}:\n{body}" for name, body in self.sections.items())


class DisasterTrackPoint:
    def __init__(self, timestamp: int, latitude: float, longitude: float,
                 max_wind_kmh: float, pressure_hpa: float, category: str):
        if max_wind_kmh <= 0:
            raise ValueError(f"max wind must be > 0, got {max_wind_kmh}.")
        self.timestamp: int = int(timestamp)
        self.latitude: float = float(latitude)
        self.longitude: float = float(longitude)
        self.max_wind_kmh: float = float(max_wind_kmh)
        self.pressure_hpa: float = float(pressure_hpa)
        self.category: str = category

    def to_dict(self) -> Dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "maxWindKmh": self.max_wind_kmh,
            "pressureHpa": self.pressure_hpa,
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DisasterTrackPoint':
        return cls(
            timestamp=data["timestamp"],
            latitude=data["latitude"],
            longitude=data["longitude"],
            max_wind_kmh=data["maxWindKmh"],
            pressure_hpa=data["pressureHpa"],
            category=data.get("category", ""),
        )


class DisasterContext:
    """Physical-domain time series of the disaster (track, wind, pressure)."""
    def __init__(self, event_name: str, rows: List[DisasterTrackPoint], landfall_time: Optional[int] = None):
        if not event_name:
            raise ValueError("event_name cannot be empty.")
        timestamps = [row.timestamp for row in rows]
        if timestamps != sorted(timestamps):
            raise ValueError("DisasterContext rows must be sorted by timestamp.")
        self.event_name: str = event_name
        self.rows: List[DisasterTrackPoint] = list(rows)
        self.landfall_time: Optional[int] = landfall_time

    @property
    def is_empty(self) -> bool:
        return not self.rows


class PPDTSItem:
    def __init__(self, item_id: int, subscale: Subscale, text: str):
        if not 1 <= item_id <= PPDTS_ITEM_COUNT:
            raise ValueError(f"PPDTS item id must be in 1..{PPDTS_ITEM_COUNT}, got {item_id}.")
        if not text:
            raise ValueError(f"PPDTS item {item_id} has no text.")
        self.item_id: int = item_id
        self.subscale: Subscale = subscale
        self.text: str = text

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.item_id, "subscale": self.subscale.value, "text": self.text}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PPDTSItem':
        return cls(int(data["id"]), Subscale.from_string(data["subscale"]), data["text"])


class PPDTSResponse:
    """Parsed questionnaire answers; valid only when all 18 items were answered."""
    def __init__(self, scores: Optional[Dict[int, int]] = None, reasons: Optional[Dict[int, str]] = None):
        self.scores: Dict[int, int] = dict(scores or {})
        self.reasons: Dict[int, str] = dict(reasons or {})
        for item_id, score in self.scores.items():
            if not 1 <= score <= 4:
                raise ValueError(f"PPDTS item {item_id} score must be in 1..4, got {score}.")

    @property
    def answered_count(self) -> int:
        return len(self.scores)

    @property
    def valid(self) -> bool:
        return self.answered_count >= PPDTS_ITEM_COUNT

    def subscale_means(self, items: List[PPDTSItem]) -> Dict[str, float]:
        means = {}
        for subscale in Subscale:
            values = [self.scores[i.item_id] for i in items if i.subscale == subscale and i.item_id in self.scores]
            if values:
                means[subscale.value] = sum(values) / len(values)
        return means

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scores": {str(k): v for k, v in sorted(self.scores.items())},
            "reasons": {str(k): v for k, v in sorted(self.reasons.items())},
            "answeredCount": self.answered_count,
            "valid": self.valid,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PPDTSResponse':
        return cls(
            scores={int(k): int(v) for k, v in data.get("scores", {}).items()},
            reasons={int(k): v for k, v in data.get("reasons", {}).items()},
        )


class ArousalFactors:
    """Four panic-arousal drivers, each scored 1..5 with a reason."""
    def __init__(self, scores: Dict[str, int], reasons: Optional[Dict[str, str]] = None):
        missing = [name for name in AROUSAL_FACTOR_NAMES if name not in scores]
        if missing:
            raise ValueError(f"Arousal factors missing: {missing}")
        for name in AROUSAL_FACTOR_NAMES:
            if not 1 <= scores[name] <= 5:
                raise ValueError(f"Arousal factor '{name}' must be in 1..5, got {scores[name]}.")
        self.scores: Dict[str, int] = {name: int(scores[name]) for name in AROUSAL_FACTOR_NAMES}
        self.reasons: Dict[str, str] = {name: (reasons or {}).get(name, "") for name in AROUSAL_FACTOR_NAMES}

    def as_tuple(self):
        return tuple(self.scores[name] for name in AROUSAL_FACTOR_NAMES)

    def to_dict(self) -> Dict[str, Any]:
        return {name: {"score": self.scores[name], "reason": self.reasons[name]} for name in AROUSAL_FACTOR_NAMES}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ArousalFactors':
        return cls(
            scores={name: int(data[name]["score"]) for name in AROUSAL_FACTOR_NAMES if name in data},
            reasons={name: data[name].get("reason", "") for name in AROUSAL_FACTOR_NAMES if name in data},
        )


class PanicAssessment:
    def __init__(self, probability: Optional[float], source: ProbabilitySource):
        if probability is not None and not 0.0 <= probability <= 1.0:
            raise ValueError(f"panic probability must be in [0, 1], got {probability}.")
        if (probability is None) != (source == ProbabilitySource.ABSENT):
            raise ValueError("probability may only be absent when the source is 'absent'.")
        self.probability: Optional[float] = probability
        self.source: ProbabilitySource = source

    def to_dict(self) -> Dict[str, Any]:
        return {"probability": self.probability, "source": self.source.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PanicAssessment':
        return cls(data.get("probability"), ProbabilitySource.from_string(data["source"]))


class TweetCandidate:
    def __init__(self, text: str, hashtags: Optional[List[str]] = None, verified: bool = False, attempt: int = 1):
        if not text or not text.strip():
            raise ValueError("TweetCandidate text cannot be empty.")
        self.text: str = text.strip()
        self.hashtags: List[str] = list(hashtags or [])
        self.verified: bool = verified
        self.attempt: int = attempt

    def to_dict(self) -> Dict[str, Any]:
        return {"text": self.text, "hashtags": self.hashtags, "verified": self.verified, "attempt": self.attempt}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TweetCandidate':
        return cls(data["text"], data.get("hashtags", []), bool(data.get("verified", False)), int(data.get("attempt", 1)))


class ExpertJudgement:
    def __init__(self, passed: bool, reason: str = ""):
        self.passed: bool = passed
        self.reason: str = reason

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": self.passed, "reason": self.reason}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExpertJudgement':
        return cls(bool(data["pass"]), data.get("reason", ""))


class ExpertVerdict:
    """Judgements of the four-expert panel; passes only if all four pass."""
    def __init__(self, judgements: Dict[str, ExpertJudgement]):
        missing = [name for name in EXPERT_NAMES if name not in judgements]
        if missing:
            raise ValueError(f"Expert verdict missing experts: {missing}")
        self.judgements: Dict[str, ExpertJudgement] = {name: judgements[name] for name in EXPERT_NAMES}

    @property
    def passed(self) -> bool:
        return all(j.passed for j in self.judgements.values())

    def failures(self) -> Dict[str, str]:
        return {name: j.reason for name, j in self.judgements.items() if not j.passed}

    def to_dict(self) -> Dict[str, Any]:
        return {name: j.to_dict() for name, j in self.judgements.items()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExpertVerdict':
        return cls({name: ExpertJudgement.from_dict(data[name]) for name in EXPERT_NAMES if name in data})


class StageTrace:
    """
    Full per-user record of the simulated psychological chain, from the
    rendered prompts to the expert verdict and the final outcome.
    """
    def __init__(self,
                 user_id: str,
                 outcome: OutcomeStatus = OutcomeStatus.FAILED,
                 outcome_reason: str = "",
                 prompts: Optional[List[Dict[str, str]]] = None,
                 replies: Optional[List[Dict[str, str]]] = None,
                 ppdts: Optional[PPDTSResponse] = None,
                 arousal: Optional[ArousalFactors] = None,
                 assessment: Optional[PanicAssessment] = None,
                 candidates: Optional[List[TweetCandidate]] = None,
                 verdict: Optional[ExpertVerdict] = None,
                 attempts: int = 0):
        if not user_id:
            raise ValueError("user_id cannot be empty.")
        self.user_id: str = user_id
        self.outcome: OutcomeStatus = outcome
        self.outcome_reason: str = outcome_reason
        # Each entry: {"stage": name, "text": ...}, in issue order.
        self.prompts: List[Dict[str, str]] = prompts if prompts is not None else []
        self.replies: List[Dict[str, str]] = replies if replies is not None else []
        self.ppdts: Optional[PPDTSResponse] = ppdts
        self.arousal: Optional[ArousalFactors] = arousal
        self.assessment: Optional[PanicAssessment] = assessment
        self.candidates: List[TweetCandidate] = candidates if candidates is not None else []
        self.verdict: Optional[ExpertVerdict] = verdict
        self.attempts: int = attempts

    @property
    def retry_count(self) -> int:
        return max(0, self.attempts - 1)

    @property
    def panic_probability(self) -> Optional[float]:
        return self.assessment.probability if self.assessment else None

    def record_prompt(self, stage: str, text: str) -> None:
        self.prompts.append({"stage": stage, "text": text})

    def record_reply(self, stage: str, text: str) -> None:
        self.replies.append({"stage": stage, "text": text})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "userId": self.user_id,
            "outcome": self.outcome.value,
            "outcomeReason": self.outcome_reason,
            "prompts": self.prompts,
            "replies": self.replies,
            "ppdts": self.ppdts.to_dict() if self.ppdts else None,
            "arousal": self.arousal.to_dict() if self.arousal else None,
            "assessment": self.assessment.to_dict() if self.assessment else None,
            "candidates": [c.to_dict() for c in self.candidates],
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "attempts": self.attempts,
            "retryCount": self.retry_count,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'StageTrace':
        user_id = data.get("userId")
        if not user_id:
            raise ValueError("userId is required for StageTrace.")

        def _opt(key, model_cls):
            value = data.get(key)
            return model_cls.from_dict(value) if value is not None else None

        return cls(
            user_id=user_id,
            outcome=OutcomeStatus.from_string(data.get("outcome", OutcomeStatus.FAILED.value)),
            outcome_reason=data.get("outcomeReason", ""),
            prompts=data.get("prompts", []),
            replies=data.get("replies", []),
            ppdts=_opt("ppdts", PPDTSResponse),
            arousal=_opt("arousal", ArousalFactors),
            assessment=_opt("assessment", PanicAssessment),
            candidates=[TweetCandidate.from_dict(c) for c in data.get("candidates", [])],
            verdict=_opt("verdict", ExpertVerdict),
            attempts=int(data.get("attempts", 0)),
        )
