# panic_forecast_tool/commands.py
# All comments and identifiers in English

import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional, Tuple, Any

from tqdm import tqdm

from .agent.pipeline import PipelineResources, run_user_pipeline
from .agent.prompts import PromptTemplates, format_percent
from .annotator.eda import eda_augment
from .annotator.label_store import AnnotationPrompts, LabelStore, run_annotation
from .corpus.timelines import IngestStats, prepare_timelines, split_train_test
from .data_models.agent_types import DisasterContext, StageTrace
from .data_models.common_types import OutcomeStatus, ScorerKind, SimulatePartition, ThemeMode
from .data_models.corpus_types import UserTimeline
from .data_models.eval_types import EvalReport, PanicLabel
from .data_models.gateway_types import GenerationParams
from .data_models.profile_types import ThemeMembership, UserProfile
from .data_models.run_config import RunConfig
from .discriminator.calibration import calibrate_threshold
from .discriminator.classifiers import (ExternalPanicClassifier, LlmPanicClassifier, PanicClassifier,
                                        RuleClassifier)
from .discriminator.veto import EXCLUSION_NO_TRACE, label_timeline, predict_users
from .errors import ClassificationUnavailable, ConfigurationError, InsufficientData, RecordNotFound
from .llm_gateway.providers import ChatProvider, create_provider
from .llm_gateway.transcript import TranscriptLog
from .metrics.evaluation import evaluate_predictions
from .metrics.report import emit_report
from .profile.builder import ProfileScorers, build_profile
from .profile.personality import ExternalPersonalityScorer, LexiconPersonalityScorer, LlmPersonalityScorer
from .profile.sentiment import LexiconSentimentClassifier, LlmSentimentClassifier
from .profile.themes import consolidate_themes
from .profile.tone import extract_tone
from .profile.topic_model import TopicModel, fit_lda, model_cache_key
from .project_io.assets import (load_panic_lexicon, load_panic_rule, load_ppdts_items, load_psych_knowledge,
                                load_sentiment_lexicon, load_stopwords, load_template, load_theme_config,
                                load_thesaurus, load_trait_lexicon)
from .project_io.corpus_reader import read_corpus, read_disaster_context, read_ground_truth, read_human_rounds
from .project_io.json_handler import (JsonlStore, load_json_document, load_partition, read_jsonl,
                                      save_json_document, save_partition, write_jsonl)

logger = logging.getLogger(__name__)


class RunPaths:
    """Artifact locations inside one run's output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.timelines = os.path.join(out_dir, "timelines.jsonl")
        self.partition = os.path.join(out_dir, "partition.json")
        self.ingest_stats = os.path.join(out_dir, "ingest_stats.json")
        self.malformed = os.path.join(out_dir, "malformed.jsonl")
        self.themes = os.path.join(out_dir, "themes.json")
        self.profiles = os.path.join(out_dir, "profiles.jsonl")
        self.traces = os.path.join(out_dir, "traces.jsonl")
        self.report_json = os.path.join(out_dir, "report.json")
        self.report_csv = os.path.join(out_dir, "report.csv")
        self.labels = os.path.join(out_dir, "labels.jsonl")
        self.augmented = os.path.join(out_dir, "augmented.jsonl")
        self.calibration = os.path.join(out_dir, "calibration.json")

    def topic_model(self, cache_key: str) -> str:
        return os.path.join(self.out_dir, f"topic_model_{cache_key[:16]}.json")

    def transcript(self, command: str) -> str:
        return os.path.join(self.out_dir, f"transcript_{command}.jsonl")


def _require(path: str, produced_by: str) -> None:
    if not os.path.exists(path):
        raise InsufficientData(f"{path} not found; run '{produced_by}' first.")


def _reasoning_params(config: RunConfig) -> GenerationParams:
    return GenerationParams(config.generation.reasoning_temperature, config.generation.max_tokens,
                            config.provider.model_id)


def open_provider(config: RunConfig, transcript: Optional[TranscriptLog] = None) -> ChatProvider:
    if not config.simulate.mock_script_path and not config.provider.endpoint_url:
        raise ConfigurationError("No provider configured: set provider.endpointUrl or pass --mock-script.")
    return create_provider(config.provider, config.simulate.mock_script_path, transcript)


def load_context(config: RunConfig) -> Optional[DisasterContext]:
    corpus = config.corpus
    if not corpus.disaster_context_path:
        return None
    return read_disaster_context(corpus.disaster_context_path, corpus.event_name or "the disaster",
                                 corpus.disaster_time)


def load_timelines(paths: RunPaths) -> List[UserTimeline]:
    _require(paths.timelines, "ingest")
    store = JsonlStore(paths.timelines, "userId")
    return [UserTimeline.from_dict(store_record) for _, store_record in sorted(store.load().items())]


def load_profiles(paths: RunPaths) -> Dict[str, UserProfile]:
    _require(paths.profiles, "profile")
    store = JsonlStore(paths.profiles, "userId")
    return {user_id: UserProfile.from_dict(data) for user_id, data in store.load().items()}


def load_traces(paths: RunPaths) -> List[StageTrace]:
    _require(paths.traces, "simulate")
    store = JsonlStore(paths.traces, "userId")
    return [StageTrace.from_dict(data) for _, data in sorted(store.load().items())]


# --- Backend factories ---

def build_discriminator(config: RunConfig, provider: Optional[ChatProvider] = None) -> PanicClassifier:
    kind = config.backends.discriminator
    if kind == ScorerKind.LEXICON:
        return RuleClassifier.from_rule(load_panic_lexicon(), load_panic_rule(config.backends.panic_rule_path))
    if kind == ScorerKind.EXTERNAL_SERVICE:
        return ExternalPanicClassifier(config.backends.discriminator_service_url, config.provider.timeout_seconds)
    if provider is None:
        raise ConfigurationError("The llm-prompt discriminator needs a provider.")
    return LlmPanicClassifier(provider, load_template("panic_label", config.template_dir),
                              load_template("retry_format", config.template_dir), _reasoning_params(config))


def build_profile_scorers(config: RunConfig, provider: Optional[ChatProvider], topic_model: TopicModel,
                          gamma: ThemeMembership) -> ProfileScorers:
    backends = config.backends
    params = _reasoning_params(config)
    retry_template = load_template("retry_format", config.template_dir)

    if backends.personality == ScorerKind.LEXICON:
        personality = LexiconPersonalityScorer(load_trait_lexicon())
    elif backends.personality == ScorerKind.EXTERNAL_SERVICE:
        personality = ExternalPersonalityScorer(backends.personality_service_url, config.provider.timeout_seconds)
    elif provider is None:
        raise ConfigurationError("The llm-prompt personality scorer needs a provider.")
    else:
        personality = LlmPersonalityScorer(provider, load_template("personality", config.template_dir),
                                           retry_template, params)

    if backends.sentiment == ScorerKind.LEXICON:
        sentiment = LexiconSentimentClassifier(load_sentiment_lexicon())
    elif provider is None:
        raise ConfigurationError("The llm-prompt sentiment classifier needs a provider.")
    else:
        sentiment = LlmSentimentClassifier(provider, load_template("sentiment", config.template_dir), params)

    tone = None
    if provider is not None:
        tone_template = load_template("tone", config.template_dir)
        tone = lambda user_id, posts: extract_tone(user_id, posts, provider, tone_template,  # noqa: E731
                                                   retry_template, params)

    return ProfileScorers(personality, sentiment, topic_model, gamma, load_stopwords(), tone,
                          inference_iterations=config.topic_model.inference_iterations, seed=config.seed)


def fit_or_load_topic_model(config: RunConfig, paths: RunPaths, documents: List[str]) -> TopicModel:
    """The fitted model is cached under a content hash; an unchanged corpus is never refit."""
    settings = config.topic_model
    stopwords = load_stopwords()
    key = model_cache_key(documents, settings.topic_count, settings.iterations, config.seed,
                          settings.effective_alpha, settings.beta, stopwords)
    path = paths.topic_model(key)
    if os.path.exists(path):
        logger.info("Reusing cached topic model %s", path)
        return TopicModel.from_dict(load_json_document(path))
    model = fit_lda(documents, settings.topic_count, settings.keywords_per_topic, settings.iterations,
                    config.seed, settings.alpha, settings.beta, stopwords)
    save_json_document(model.to_dict(), path)
    logger.info("Topic model saved successfully to %s", path)
    return model


# --- Subcommands ---

def ingest(config: RunConfig) -> IngestStats:
    paths = RunPaths(config.out_dir)
    thresholds = config.thresholds
    result = read_corpus(config.corpus.post_paths, thresholds.malformed_abort_fraction)
    write_jsonl((m.to_dict() for m in result.malformed), paths.malformed)

    stats = IngestStats()
    stats.malformed_rows = len(result.malformed)
    timelines = prepare_timelines(result.posts, config.corpus.disaster_time, thresholds, stats)

    if config.corpus.labels_path:
        truths = read_ground_truth(config.corpus.labels_path)
        for timeline in timelines:
            label = truths.get(timeline.user_id)
            if label is not None:
                timeline.ground_truth = PanicLabel.from_dict({"label": label.value})
    else:
        # Derived labels: veto over each user's real post-disaster posts.
        with TranscriptLog(paths.transcript("ingest")) as transcript:
            provider = None
            if config.backends.discriminator == ScorerKind.LLM_PROMPT:
                provider = open_provider(config, transcript)
            backend = build_discriminator(config, provider)
            for timeline in timelines:
                try:
                    timeline.ground_truth = label_timeline(timeline, backend)
                except ClassificationUnavailable as e:
                    logger.warning("User '%s' left without ground truth: %s", timeline.user_id, e)

    for timeline in timelines:
        if timeline.ground_truth is None:
            continue
        if timeline.ground_truth.is_panic:
            stats.panic_users += 1
        else:
            stats.no_panic_users += 1

    store = JsonlStore(paths.timelines, "userId")
    store.reset()
    for timeline in timelines:
        store.append(timeline.to_dict())
    store.compact()

    if timelines:
        save_partition(split_train_test([t.user_id for t in timelines], thresholds.split_ratio, config.seed),
                       paths.partition)
    save_json_document(stats.to_dict(), paths.ingest_stats)
    logger.info("Ingest finished: %d users stored in %s (%d Panic / %d NoPanic)",
                len(timelines), paths.timelines, stats.panic_users, stats.no_panic_users)
    return stats


def _optional_provider(config: RunConfig, transcript: Optional[TranscriptLog]) -> Optional[ChatProvider]:
    try:
        return open_provider(config, transcript)
    except ConfigurationError as e:
        logger.warning("%s LLM-backed features are skipped.", e)
        return None


def profile(config: RunConfig) -> List[UserProfile]:
    paths = RunPaths(config.out_dir)
    timelines = load_timelines(paths)
    documents = [post.text for timeline in timelines for post in timeline.pre_posts]
    model = fit_or_load_topic_model(config, paths, documents)
    context = load_context(config)

    with TranscriptLog(paths.transcript("profile")) as transcript:
        provider = _optional_provider(config, transcript)
        gamma = consolidate_themes(model.top_keywords(), config.backends.theme_mode, load_theme_config(),
                                   provider if config.backends.theme_mode == ThemeMode.LLM else None,
                                   load_template("theme_consolidation", config.template_dir),
                                   load_template("retry_format", config.template_dir), _reasoning_params(config))
        save_json_document(gamma.to_dict(), paths.themes)
        scorers = build_profile_scorers(config, provider, model, gamma)
        profiles = [build_profile(t, context, scorers, config.corpus.observation_days) for t in timelines]

    write_jsonl((p.to_dict() for p in profiles), paths.profiles)
    flagged = sum(1 for p in profiles if p.flags)
    logger.info("Profiles saved successfully to %s (%d users, %d with flags)", paths.profiles, len(profiles), flagged)
    return profiles


def simulation_users(config: RunConfig, paths: RunPaths, profiles: Dict[str, UserProfile]) -> List[str]:
    if config.simulate.partition == SimulatePartition.ALL:
        return sorted(profiles)
    _require(paths.partition, "ingest")
    partition = load_partition(paths.partition)
    return sorted(u for u in partition.test if u in profiles)


def simulate(config: RunConfig, quiet: bool = False) -> List[StageTrace]:
    """
    Runs the agent chain for every selected user, up to the provider's
    in-flight bound at once. With `simulate.resume`, users whose stored trace
    did not fail are skipped.
    """
    paths = RunPaths(config.out_dir)
    timelines = {t.user_id: t for t in load_timelines(paths)}
    profiles = load_profiles(paths)
    context = load_context(config)
    if context is None or context.is_empty:
        raise ConfigurationError("simulate needs corpus.disasterContextPath with at least one row.")

    users = simulation_users(config, paths, profiles)
    store = JsonlStore(paths.traces, "userId")
    done = set()
    if config.simulate.resume:
        done = {user_id for user_id, data in store.load().items()
                if data.get("outcome") != OutcomeStatus.FAILED.value}
        logger.info("Resuming: %d of %d users already traced", len(done & set(users)), len(users))
    else:
        store.reset()
    pending = [u for u in users if u not in done]

    with TranscriptLog(paths.transcript("simulate"), keep_existing=config.simulate.resume) as transcript:
        provider = open_provider(config, transcript)
        resources = PipelineResources(load_psych_knowledge(), context, load_ppdts_items(),
                                      PromptTemplates.load(config.template_dir), provider, config)
        with ThreadPoolExecutor(max_workers=config.provider.max_in_flight) as pool:
            futures = {pool.submit(run_user_pipeline, timelines[u], profiles[u], resources): u for u in pending}
            for future in tqdm(as_completed(futures), total=len(futures), desc="simulate", disable=quiet):
                user_id = futures[future]
                try:
                    trace = future.result()
                except Exception as e:
                    logger.exception("Simulation crashed for user '%s'", user_id)
                    trace = StageTrace(user_id, OutcomeStatus.FAILED, f"{type(e).__name__}: {e}")
                store.append(trace.to_dict())

    store.compact()
    selected = set(users)
    traces = [StageTrace.from_dict(d) for user_id, d in sorted(store.load().items()) if user_id in selected]
    ledger = outcome_ledger(traces)
    logger.info("Simulation finished: %s", ", ".join(f"{k} {v}" for k, v in ledger.items()))
    return traces


def outcome_ledger(traces: List[StageTrace]) -> Dict[str, int]:
    ledger = {status.value: 0 for status in OutcomeStatus}
    for trace in traces:
        ledger[trace.outcome.value] += 1
    return ledger


def evaluate(config: RunConfig) -> EvalReport:
    paths = RunPaths(config.out_dir)
    traces = load_traces(paths)
    timelines = load_timelines(paths)
    truths = {t.user_id: t.ground_truth.label for t in timelines if t.ground_truth is not None}

    with TranscriptLog(paths.transcript("evaluate")) as transcript:
        provider = open_provider(config, transcript) if config.backends.discriminator == ScorerKind.LLM_PROMPT else None
        backend = build_discriminator(config, provider)
        predictions, exclusions = predict_users(traces, backend, truths)

    profiles = load_profiles(paths) if os.path.exists(paths.profiles) else {}
    traced = {t.user_id for t in traces}
    missing = [u for u in simulation_users(config, paths, profiles) if u not in traced] if profiles else []
    if missing:
        exclusions[EXCLUSION_NO_TRACE] = len(missing)

    report = evaluate_predictions(predictions, exclusions, config.overrides())
    emit_report(report, paths.report_json, paths.report_csv)
    return report


def annotate(config: RunConfig) -> Dict[str, int]:
    """
    Labels the retained users' post-disaster posts, then writes EDA variants
    of the finally labeled ones.
    """
    paths = RunPaths(config.out_dir)
    posts = [post for timeline in load_timelines(paths) for post in timeline.post_posts]
    human_rounds = {}
    if config.annotation.human_rounds_path:
        human_rounds = read_human_rounds(config.annotation.human_rounds_path)

    store = LabelStore(paths.labels)
    with TranscriptLog(paths.transcript("annotate"), keep_existing=True) as transcript:
        provider = open_provider(config, transcript)
        prompts = AnnotationPrompts(load_template("relevance_label", config.template_dir),
                                    load_template("panic_label", config.template_dir),
                                    load_template("retry_format", config.template_dir),
                                    _reasoning_params(config), config.corpus.event_name or "the disaster")
        counts = run_annotation(posts, store, provider, prompts, human_rounds, config.annotation.label_relevance)

    thesaurus = load_thesaurus()
    augmented = []
    for post_id, record in sorted(store.records().items()):
        if not record.is_final or not record.text.strip():
            continue
        for index, variant in enumerate(eda_augment(record.text, config.annotation.eda, thesaurus)):
            augmented.append({"postId": post_id, "variant": index, "text": variant,
                              "label": record.final_label.value})
    count = write_jsonl(augmented, paths.augmented)
    logger.info("Augmented set saved successfully to %s (%d variants)", paths.augmented, count)
    counts["augmented"] = count
    return counts


def calibrate(config: RunConfig) -> Tuple[float, float]:
    """Fits the rule threshold to the merged labels plus their EDA variants."""
    paths = RunPaths(config.out_dir)
    _require(paths.labels, "annotate")
    texts: List[str] = []
    labels: List[bool] = []
    for _, record in sorted(LabelStore(paths.labels).records().items()):
        if record.is_final:
            texts.append(record.text)
            labels.append(record.final_label.value == "Panic")
    if os.path.exists(paths.augmented):
        for data in read_jsonl(paths.augmented):
            texts.append(data["text"])
            labels.append(data["label"] == "Panic")
    if not texts:
        raise InsufficientData("No finally labeled posts to calibrate against.")

    classifier = RuleClassifier.from_rule(load_panic_lexicon(), load_panic_rule(config.backends.panic_rule_path))
    threshold, f1 = calibrate_threshold(texts, labels, classifier)
    save_json_document({"threshold": threshold, "f1": f1, "textCount": len(texts),
                        "panicCount": sum(labels)}, paths.calibration)
    logger.info("Calibration saved successfully to %s", paths.calibration)
    return threshold, f1


# --- Trace report ---

def _section(title: str, lines: List[str]) -> List[str]:
    return [f"== {title} =="] + (lines or ["(none)"]) + [""]


def trace_document(trace: StageTrace, profile: Optional[UserProfile]) -> Dict[str, Any]:
    return {"trace": trace.to_dict(), "profile": profile.to_dict() if profile else None}


def render_trace(trace: StageTrace, profile: Optional[UserProfile], items=None) -> str:
    """Plain-text case report of one user's chain, from profile to verdict."""
    lines = [f"User: {trace.user_id}", f"Outcome: {trace.outcome.value}"]
    if trace.outcome_reason:
        lines.append(f"Reason: {trace.outcome_reason}")
    lines.append("")

    profile_lines = []
    if profile is not None:
        if profile.personality:
            profile_lines.append("Personality: " + ", ".join(f"{k} {v:.3f}" for k, v in
                                                            profile.personality.to_dict().items()))
        if profile.sentiment_trend:
            trend = profile.sentiment_trend
            profile_lines.append(f"Sentiment: positive {trend.positive:.0%}, neutral {trend.neutral:.0%}, "
                                 f"negative {trend.negative:.0%}")
        if profile.theme_profile:
            profile_lines.append("Themes: " + ", ".join(profile.theme_profile.top_themes[:3]))
        profile_lines.append("Tone: " + (", ".join(profile.tone.to_dict()) if profile.tone else "unavailable"))
        risk = profile.risk_comm
        distance = f"{risk.distance_to_track_km:.1f} km" if risk.distance_to_track_km is not None else "unknown"
        profile_lines.append(f"Network: {risk.follower_count} followers, {risk.followee_count} followees, "
                             f"{risk.posts_per_day:.2f} posts/day, {distance} from the track")
        if profile.flags:
            profile_lines.append("Flags: " + ", ".join(profile.flags))
    lines += _section("Profile", profile_lines)

    ppdts_lines = []
    if trace.ppdts is not None:
        ppdts_lines.append(f"Answered: {trace.ppdts.answered_count}")
        for item_id, score in sorted(trace.ppdts.scores.items()):
            reason = trace.ppdts.reasons.get(item_id, "")
            ppdts_lines.append(f"Q{item_id}: {score}" + (f" ({reason})" if reason else ""))
        if items:
            for subscale, mean in trace.ppdts.subscale_means(items).items():
                ppdts_lines.append(f"{subscale} mean: {mean:.2f}")
    lines += _section("Risk perception (PPDTS)", ppdts_lines)

    arousal_lines = []
    if trace.arousal is not None:
        for name, score in trace.arousal.scores.items():
            reason = trace.arousal.reasons.get(name, "")
            arousal_lines.append(f"{name.capitalize()}: {score}/5" + (f" ({reason})" if reason else ""))
    if trace.assessment is not None:
        probability = trace.assessment.probability
        shown = format_percent(probability) + ("%" if probability is not None else "")
        arousal_lines.append(f"Panic probability: {shown} [{trace.assessment.source.value}]")
    lines += _section("Panic arousal", arousal_lines)

    tweet_lines = [f"{'verified' if c.verified else 'unverified'} (attempt {c.attempt}): {c.text}"
                   for c in trace.candidates]
    if trace.attempts:
        tweet_lines.append(f"Attempts: {trace.attempts}")
    lines += _section("Generated posts", tweet_lines)

    verdict_lines = []
    if trace.verdict is not None:
        for name, judgement in trace.verdict.judgements.items():
            verdict_lines.append(f"{name.capitalize()}: {'YES' if judgement.passed else 'NO'}"
                                 + (f" ({judgement.reason})" if judgement.reason else ""))
    lines += _section("Expert verdict", verdict_lines)
    return "\n".join(lines).rstrip() + "\n"


def trace(config: RunConfig, user_id: str) -> Tuple[StageTrace, Optional[UserProfile], str]:
    paths = RunPaths(config.out_dir)
    _require(paths.traces, "simulate")
    data = JsonlStore(paths.traces, "userId").get(user_id)
    if data is None:
        raise RecordNotFound(f"No trace for user '{user_id}' in {paths.traces}")
    stage_trace = StageTrace.from_dict(data)
    profiles = load_profiles(paths) if os.path.exists(paths.profiles) else {}
    user_profile = profiles.get(user_id)
    return stage_trace, user_profile, render_trace(stage_trace, user_profile, load_ppdts_items())
