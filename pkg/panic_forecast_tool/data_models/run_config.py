# panic_forecast_tool/data_models/run_config.py
# All comments and identifiers in English

import datetime
from typing import List, Dict, Any, Optional

from .annotation_types import EdaConfig
from .common_types import ScorerKind, ThemeMode, SimulatePartition
from .gateway_types import ProviderConfig


def _check_range(name: str, value: float, low: float, high: float, inclusive_low: bool = True,
                 inclusive_high: bool = True) -> None:
    ok_low = value >= low if inclusive_low else value > low
    ok_high = value <= high if inclusive_high else value < high
    if not (ok_low and ok_high):
        lo = "[" if inclusive_low else "("
        hi = "]" if inclusive_high else ")"
        raise ValueError(f"{name} must be in {lo}{low}, {high}{hi}, got {value}.")


class RunMetadata:
    """
    Descriptive metadata of a run configuration file.
    """
    def __init__(self,
                 run_name: str = "New Panic Forecast Run",
                 format_version: str = "1.0.0",
                 creation_date: str = None,  # ISO 8601 timestamp string
                 author: str = ""):
        self.run_name: str = run_name
        self.format_version: str = format_version
        self.creation_date: str = creation_date if creation_date else datetime.datetime.now(datetime.timezone.utc).isoformat()
        self.author: str = author

    def to_dict(self) -> Dict[str, Any]:
        return {
            "runName": self.run_name,
            "formatVersion": self.format_version,
            "creationDate": self.creation_date,
            "author": self.author
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunMetadata':
        return cls(
            run_name=data.get("runName", "New Panic Forecast Run"),
            format_version=data.get("formatVersion", "1.0.0"),
            creation_date=data.get("creationDate"),  # Will be auto-generated if None
            author=data.get("author", "")
        )


class CorpusSettings:
    def __init__(self,
                 post_paths: Optional[List[str]] = None,
                 disaster_context_path: str = "",
                 disaster_time: int = 0,
                 event_name: str = "Hurricane Sandy",
                 labels_path: str = "",
                 observation_days: Optional[float] = None):
        if observation_days is not None and observation_days <= 0:
            raise ValueError("observation_days must be positive when given.")
        self.post_paths: List[str] = list(post_paths or [])
        self.disaster_context_path: str = disaster_context_path
        self.disaster_time: int = int(disaster_time)
        self.event_name: str = event_name
        self.labels_path: str = labels_path
        # Divisor for postsPerDay. None falls back to each user's own
        # first-to-last post span (at least one day).
        self.observation_days: Optional[float] = observation_days

    def to_dict(self) -> Dict[str, Any]:
        return {
            "postPaths": self.post_paths,
            "disasterContextPath": self.disaster_context_path,
            "disasterTime": self.disaster_time,
            "eventName": self.event_name,
            "labelsPath": self.labels_path,
            "observationDays": self.observation_days,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CorpusSettings':
        return cls(
            post_paths=data.get("postPaths", []),
            disaster_context_path=data.get("disasterContextPath", ""),
            disaster_time=int(data.get("disasterTime", 0)),
            event_name=data.get("eventName", "Hurricane Sandy"),
            labels_path=data.get("labelsPath", ""),
            observation_days=data.get("observationDays"),
        )


class Thresholds:
    """Numeric thresholds; defaults are the values stated for the original study."""
    def __init__(self,
                 dedup_similarity: float = 0.85,
                 min_meaningful_tokens: int = 5,
                 min_pre_posts: int = 10,
                 split_ratio: float = 0.8,
                 questionnaire_validity: int = 18,
                 tone_calm_below: float = 0.49,
                 tone_panic_above: float = 0.51,
                 max_retries: int = 3,
                 personality_float_range: float = 0.15,
                 malformed_abort_fraction: float = 0.10):
        _check_range("dedup_similarity", dedup_similarity, 0.0, 1.0)
        _check_range("split_ratio", split_ratio, 0.0, 1.0, inclusive_low=False, inclusive_high=False)
        _check_range("tone_calm_below", tone_calm_below, 0.0, 1.0)
        _check_range("tone_panic_above", tone_panic_above, 0.0, 1.0)
        _check_range("personality_float_range", personality_float_range, 0.0, 1.0)
        _check_range("malformed_abort_fraction", malformed_abort_fraction, 0.0, 1.0)
        if tone_calm_below > tone_panic_above:
            raise ValueError("tone_calm_below must not exceed tone_panic_above.")
        if min_meaningful_tokens < 0 or min_pre_posts < 0:
            raise ValueError("token and post minimums must be non-negative.")
        if not 1 <= questionnaire_validity <= 18:
            raise ValueError("questionnaire_validity must be in 1..18.")
        if max_retries < 0:
            raise ValueError("max_retries must be non-negative.")
        self.dedup_similarity: float = dedup_similarity
        self.min_meaningful_tokens: int = min_meaningful_tokens
        self.min_pre_posts: int = min_pre_posts
        self.split_ratio: float = split_ratio
        self.questionnaire_validity: int = questionnaire_validity
        self.tone_calm_below: float = tone_calm_below
        self.tone_panic_above: float = tone_panic_above
        self.max_retries: int = max_retries
        self.personality_float_range: float = personality_float_range
        self.malformed_abort_fraction: float = malformed_abort_fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dedupSimilarity": self.dedup_similarity,
            "minMeaningfulTokens": self.min_meaningful_tokens,
            "minPrePosts": self.min_pre_posts,
            "splitRatio": self.split_ratio,
            "questionnaireValidity": self.questionnaire_validity,
            "toneCalmBelow": self.tone_calm_below,
            "tonePanicAbove": self.tone_panic_above,
            "maxRetries": self.max_retries,
            "personalityFloatRange": self.personality_float_range,
            "malformedAbortFraction": self.malformed_abort_fraction,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Thresholds':
        defaults = cls()
        return cls(
            dedup_similarity=float(data.get("dedupSimilarity", defaults.dedup_similarity)),
            min_meaningful_tokens=int(data.get("minMeaningfulTokens", defaults.min_meaningful_tokens)),
            min_pre_posts=int(data.get("minPrePosts", defaults.min_pre_posts)),
            split_ratio=float(data.get("splitRatio", defaults.split_ratio)),
            questionnaire_validity=int(data.get("questionnaireValidity", defaults.questionnaire_validity)),
            tone_calm_below=float(data.get("toneCalmBelow", defaults.tone_calm_below)),
            tone_panic_above=float(data.get("tonePanicAbove", defaults.tone_panic_above)),
            max_retries=int(data.get("maxRetries", defaults.max_retries)),
            personality_float_range=float(data.get("personalityFloatRange", defaults.personality_float_range)),
            malformed_abort_fraction=float(data.get("malformedAbortFraction", defaults.malformed_abort_fraction)),
        )


class GenerationSettings:
    def __init__(self,
                 reasoning_temperature: float = 0.4,
                 tweet_temperature: float = 0.7,
                 repetition_penalty: float = 0.4,
                 expert_temperature: float = 0.4,
                 tweet_count: int = 1,
                 max_tokens: int = 1024):
        for name, value in (("reasoning_temperature", reasoning_temperature),
                            ("tweet_temperature", tweet_temperature),
                            ("expert_temperature", expert_temperature)):
            _check_range(name, value, 0.0, 2.0)
        if tweet_count not in (1, 3):
            raise ValueError(f"tweet_count must be 1 or 3, got {tweet_count}.")
        if max_tokens <= 0:
            raise ValueError("max_tokens must be positive.")
        self.reasoning_temperature: float = reasoning_temperature
        self.tweet_temperature: float = tweet_temperature
        self.repetition_penalty: float = repetition_penalty
        self.expert_temperature: float = expert_temperature
        self.tweet_count: int = tweet_count
        self.max_tokens: int = max_tokens

    def to_dict(self) -> Dict[str, Any]:
        return {
            "reasoningTemperature": self.reasoning_temperature,
            "tweetTemperature": self.tweet_temperature,
            "repetitionPenalty": self.repetition_penalty,
            "expertTemperature": self.expert_temperature,
            "tweetCount": self.tweet_count,
            "maxTokens": self.max_tokens,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GenerationSettings':
        defaults = cls()
        return cls(
            reasoning_temperature=float(data.get("reasoningTemperature", defaults.reasoning_temperature)),
            tweet_temperature=float(data.get("tweetTemperature", defaults.tweet_temperature)),
            repetition_penalty=float(data.get("repetitionPenalty", defaults.repetition_penalty)),
            expert_temperature=float(data.get("expertTemperature", defaults.expert_temperature)),
            tweet_count=int(data.get("tweetCount", defaults.tweet_count)),
            max_tokens=int(data.get("maxTokens", defaults.max_tokens)),
        )


class BackendSettings:
    def __init__(self,
                 personality: ScorerKind = ScorerKind.LEXICON,
                 sentiment: ScorerKind = ScorerKind.LEXICON,
                 discriminator: ScorerKind = ScorerKind.LEXICON,
                 theme_mode: ThemeMode = ThemeMode.STATIC_CONFIG,
                 personality_service_url: str = "",
                 discriminator_service_url: str = "",
                 panic_rule_path: str = ""):
        if sentiment == ScorerKind.EXTERNAL_SERVICE:
            raise ValueError("sentiment backend must be 'lexicon' or 'llm-prompt'.")
        if personality == ScorerKind.EXTERNAL_SERVICE and not personality_service_url:
            raise ValueError("personality_service_url is required for the external-service personality scorer.")
        if discriminator == ScorerKind.EXTERNAL_SERVICE and not discriminator_service_url:
            raise ValueError("discriminator_service_url is required for the external-service discriminator.")
        self.personality: ScorerKind = personality
        self.sentiment: ScorerKind = sentiment
        self.discriminator: ScorerKind = discriminator
        self.theme_mode: ThemeMode = theme_mode
        self.personality_service_url: str = personality_service_url
        self.discriminator_service_url: str = discriminator_service_url
        # Empty means the bundled rule parameters.
        self.panic_rule_path: str = panic_rule_path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "personality": self.personality.value,
            "sentiment": self.sentiment.value,
            "discriminator": self.discriminator.value,
            "themeMode": self.theme_mode.value,
            "personalityServiceUrl": self.personality_service_url,
            "discriminatorServiceUrl": self.discriminator_service_url,
            "panicRulePath": self.panic_rule_path,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BackendSettings':
        return cls(
            personality=ScorerKind.from_string(data.get("personality", "lexicon")),
            sentiment=ScorerKind.from_string(data.get("sentiment", "lexicon")),
            discriminator=ScorerKind.from_string(data.get("discriminator", "lexicon")),
            theme_mode=ThemeMode.from_string(data.get("themeMode", "static-config")),
            personality_service_url=data.get("personalityServiceUrl", ""),
            discriminator_service_url=data.get("discriminatorServiceUrl", ""),
            panic_rule_path=data.get("panicRulePath", ""),
        )


class TopicModelSettings:
    def __init__(self,
                 topic_count: int = 25,
                 keywords_per_topic: int = 10,
                 iterations: int = 500,
                 alpha: Optional[float] = None,
                 beta: float = 0.01,
                 inference_iterations: int = 50):
        if topic_count < 2:
            raise ValueError("topic_count must be >= 2.")
        if keywords_per_topic < 1 or iterations < 1 or inference_iterations < 1:
            raise ValueError("keywords_per_topic and iteration counts must be positive.")
        if beta <= 0 or (alpha is not None and alpha <= 0):
            raise ValueError("Dirichlet priors must be positive.")
        self.topic_count: int = topic_count
        self.keywords_per_topic: int = keywords_per_topic
        self.iterations: int = iterations
        self.alpha: Optional[float] = alpha  # None means 50 / topic_count
        self.beta: float = beta
        self.inference_iterations: int = inference_iterations

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.topic_count

    def to_dict(self) -> Dict[str, Any]:
        return {
            "topicCount": self.topic_count,
            "keywordsPerTopic": self.keywords_per_topic,
            "iterations": self.iterations,
            "alpha": self.alpha,
            "beta": self.beta,
            "inferenceIterations": self.inference_iterations,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TopicModelSettings':
        defaults = cls()
        return cls(
            topic_count=int(data.get("topicCount", defaults.topic_count)),
            keywords_per_topic=int(data.get("keywordsPerTopic", defaults.keywords_per_topic)),
            iterations=int(data.get("iterations", defaults.iterations)),
            alpha=data.get("alpha"),
            beta=float(data.get("beta", defaults.beta)),
            inference_iterations=int(data.get("inferenceIterations", defaults.inference_iterations)),
        )


class AblationSettings:
    """Stage switches; all enabled reproduces the full chain."""
    def __init__(self, risk_sensing: bool = True, emotion_arousal: bool = True, expert_assessment: bool = True):
        self.risk_sensing: bool = risk_sensing
        self.emotion_arousal: bool = emotion_arousal
        self.expert_assessment: bool = expert_assessment

    def to_dict(self) -> Dict[str, Any]:
        return {"riskSensing": self.risk_sensing, "emotionArousal": self.emotion_arousal,
                "expertAssessment": self.expert_assessment}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AblationSettings':
        return cls(bool(data.get("riskSensing", True)), bool(data.get("emotionArousal", True)),
                   bool(data.get("expertAssessment", True)))


class SimulateSettings:
    def __init__(self, partition: SimulatePartition = SimulatePartition.TEST, resume: bool = False,
                 mock_script_path: str = ""):
        self.partition: SimulatePartition = partition
        self.resume: bool = resume
        # When set, the scripted mock provider replaces the HTTP provider.
        self.mock_script_path: str = mock_script_path

    def to_dict(self) -> Dict[str, Any]:
        return {"partition": self.partition.value, "resume": self.resume, "mockScriptPath": self.mock_script_path}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimulateSettings':
        return cls(SimulatePartition.from_string(data.get("partition", "test")), bool(data.get("resume", False)),
                   data.get("mockScriptPath", ""))


class AnnotationSettings:
    def __init__(self,
                 human_rounds_path: str = "",
                 label_relevance: bool = True,
                 eda: Optional[EdaConfig] = None):
        self.human_rounds_path: str = human_rounds_path
        self.label_relevance: bool = label_relevance
        self.eda: EdaConfig = eda if eda is not None else EdaConfig()

    def to_dict(self) -> Dict[str, Any]:
        return {"humanRoundsPath": self.human_rounds_path, "labelRelevance": self.label_relevance,
                "eda": self.eda.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AnnotationSettings':
        return cls(
            human_rounds_path=data.get("humanRoundsPath", ""),
            label_relevance=bool(data.get("labelRelevance", True)),
            eda=EdaConfig.from_dict(data.get("eda", {})),
        )


class RunConfig:
    """
    Root of a run configuration. Serialized to/from the JSON config file
    shared by every subcommand.
    """
    def __init__(self):
        self.run_metadata: RunMetadata = RunMetadata()
        self.seed: int = 2012
        self.out_dir: str = "run_output"
        self.template_dir: str = ""  # empty means the bundled templates
        self.corpus: CorpusSettings = CorpusSettings()
        self.thresholds: Thresholds = Thresholds()
        self.generation: GenerationSettings = GenerationSettings()
        self.provider: ProviderConfig = ProviderConfig()
        self.backends: BackendSettings = BackendSettings()
        self.topic_model: TopicModelSettings = TopicModelSettings()
        self.ablation: AblationSettings = AblationSettings()
        self.simulate: SimulateSettings = SimulateSettings()
        self.annotation: AnnotationSettings = AnnotationSettings()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "runMetadata": self.run_metadata.to_dict(),
            "seed": self.seed,
            "outDir": self.out_dir,
            "templateDir": self.template_dir,
            "corpus": self.corpus.to_dict(),
            "thresholds": self.thresholds.to_dict(),
            "generation": self.generation.to_dict(),
            "provider": self.provider.to_dict(),
            "backends": self.backends.to_dict(),
            "topicModel": self.topic_model.to_dict(),
            "ablation": self.ablation.to_dict(),
            "simulate": self.simulate.to_dict(),
            "annotation": self.annotation.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        instance = cls()
        instance.run_metadata = RunMetadata.from_dict(data.get("runMetadata", {}))
        instance.seed = int(data.get("seed", instance.seed))
        if not 0 <= instance.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {instance.seed}.")
        instance.out_dir = data.get("outDir", instance.out_dir)
        instance.template_dir = data.get("templateDir", "")
        instance.corpus = CorpusSettings.from_dict(data.get("corpus", {}))
        instance.thresholds = Thresholds.from_dict(data.get("thresholds", {}))
        instance.generation = GenerationSettings.from_dict(data.get("generation", {}))
        instance.provider = ProviderConfig.from_dict(data.get("provider", {}))
        instance.backends = BackendSettings.from_dict(data.get("backends", {}))
        instance.topic_model = TopicModelSettings.from_dict(data.get("topicModel", {}))
        instance.ablation = AblationSettings.from_dict(data.get("ablation", {}))
        instance.simulate = SimulateSettings.from_dict(data.get("simulate", {}))
        instance.annotation = AnnotationSettings.from_dict(data.get("annotation", {}))
        return instance

    def overrides(self) -> Dict[str, Any]:
        """
        Flattened `section.key -> value` for every setting that differs from
        the defaults. Run metadata is descriptive and never reported.
        """
        current = _flatten(self.to_dict())
        defaults = _flatten(RunConfig().to_dict())
        return {key: value for key, value in sorted(current.items())
                if not key.startswith("runMetadata.") and defaults.get(key) != value}


def _flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat
