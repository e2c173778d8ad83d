# panic_forecast_tool/data_models/common_types.py
# All comments and identifiers in English

from enum import Enum


class _StringEnum(Enum):
    """
    Base for enums whose string values are written to the JSON stores.
    """

    @classmethod
    def from_string(cls, s: str):
        """Converts a string to an enum member."""
        for member in cls:
            if member.value == s:
                return member
        raise ValueError(f"'{s}' is not a valid {cls.__name__} string.")

    def __str__(self):
        return self.value


class PanicClass(_StringEnum):
    PANIC = "Panic"
    NO_PANIC = "NoPanic"

    @classmethod
    def from_bool(cls, is_panic: bool) -> "PanicClass":
        return cls.PANIC if is_panic else cls.NO_PANIC


class ChatRole(_StringEnum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


class Subscale(_StringEnum):
    KNOWLEDGE_AWARENESS = "KA"
    ANTICIPATION_MANAGEMENT = "AAM"


class ToneBand(_StringEnum):
    PANICKED = "Panicked"
    NEUTRAL = "Neutral"
    CALM = "Calm"


class ProbabilitySource(_StringEnum):
    LLM_REPORTED = "llm-reported"
    FALLBACK_FORMULA = "fallback-formula"
    ABSENT = "absent"  # emotion-arousal stage disabled


class OutcomeStatus(_StringEnum):
    COMPLETED = "completed"
    UNVERIFIED_ACCEPTED = "unverified-accepted"
    INVALID_QUESTIONNAIRE = "invalid-questionnaire"
    PROVIDER_REFUSED = "provider-refused"
    FAILED = "failed"

    @property
    def is_predictable(self) -> bool:
        return self in (OutcomeStatus.COMPLETED, OutcomeStatus.UNVERIFIED_ACCEPTED)


class ScorerKind(_StringEnum):
    """Backend kinds shared by the personality, sentiment and panic scorers."""
    LEXICON = "lexicon"
    LLM_PROMPT = "llm-prompt"
    EXTERNAL_SERVICE = "external-service"


class ThemeMode(_StringEnum):
    LLM = "llm"
    STATIC_CONFIG = "static-config"


class SimulatePartition(_StringEnum):
    TEST = "test"
    ALL = "all"


# Big Five trait names in the order used by every vector and prompt.
BIG_FIVE_TRAITS = ("openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism")

# The eight consolidated themes, in theme-index order.
THEME_NAMES = (
    "Politics & Elections",
    "Natural Disasters & Weather",
    "Energy & Environment",
    "Sports & Entertainment",
    "Economy & Business",
    "Society & News",
    "Technology & Innovation",
    "Miscellaneous",
)
MISCELLANEOUS_THEME_INDEX = 7

SECONDS_PER_DAY = 86400
