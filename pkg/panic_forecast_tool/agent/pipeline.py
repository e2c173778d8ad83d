# panic_forecast_tool/agent/pipeline.py
# All comments and identifiers in English

import logging
from typing import Dict, List, Optional, Tuple

from ..data_models.agent_types import (DisasterContext, ExpertVerdict, PanicAssessment, PPDTSItem,
                                       PsychKnowledge, StageTrace, TweetCandidate)
from ..data_models.common_types import OutcomeStatus, ProbabilitySource, ToneBand
from ..data_models.corpus_types import UserTimeline
from ..data_models.gateway_types import GenerationParams
from ..data_models.profile_types import UserProfile
from ..data_models.run_config import RunConfig
from ..errors import (AgentParseError, ArousalParseError, GenerationParseError, PanicForecastError,
                      ProviderRefusal, VerdictParseError)
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession
from .parsers import parse_arousal, parse_ppdts, parse_tweets, parse_verdict
from .prompts import (PromptTemplates, render_arousal, render_expert_system, render_generation, render_ppdts,
                      render_stage1, render_verification)
from .scoring import assess_panic, tone_band

logger = logging.getLogger(__name__)


class PipelineResources:
    """Inputs shared by every user's pipeline in one run."""

    def __init__(self,
                 knowledge: PsychKnowledge,
                 context: DisasterContext,
                 items: List[PPDTSItem],
                 templates: PromptTemplates,
                 provider: ChatProvider,
                 config: RunConfig):
        self.knowledge = knowledge
        self.context = context
        self.items = items
        self.templates = templates
        self.provider = provider
        self.config = config

    def params(self, temperature: float, repetition_penalty: Optional[float] = None) -> GenerationParams:
        return GenerationParams(temperature, self.config.generation.max_tokens, self.config.provider.model_id,
                                repetition_penalty)

    @property
    def reasoning_params(self) -> GenerationParams:
        return self.params(self.config.generation.reasoning_temperature)

    @property
    def tweet_params(self) -> GenerationParams:
        generation = self.config.generation
        return self.params(generation.tweet_temperature, generation.repetition_penalty)

    @property
    def expert_params(self) -> GenerationParams:
        return self.params(self.config.generation.expert_temperature)


def _exchange(session: AgentSession, trace: StageTrace, stage: str, prompt: str, params: GenerationParams) -> str:
    trace.record_prompt(stage, prompt)
    reply = session.complete(prompt, params)
    trace.record_reply(stage, reply)
    return reply


def verify_tweets(resources: PipelineResources, profile: UserProfile, probability: Optional[float],
                  candidates: List[TweetCandidate], attempt: int,
                  trace: Optional[StageTrace] = None) -> ExpertVerdict:
    """One fresh expert-panel session per attempt; all four experts must pass."""
    if not candidates:
        raise ValueError("verify_tweets needs at least one candidate.")
    system = render_expert_system(resources.knowledge, resources.context, profile, resources.templates)
    session = AgentSession(f"{profile.user_id}/expert/{attempt}", resources.provider, system)
    prompt = render_verification([c.text for c in candidates], resources.context.event_name, probability,
                                 resources.templates)
    if trace is not None:
        trace.record_prompt("verification", prompt)
    reply = session.complete(prompt, resources.expert_params)
    if trace is not None:
        trace.record_reply("verification", reply)
    return parse_verdict(reply)


def generate_candidates(session: AgentSession, resources: PipelineResources, trace: StageTrace,
                        probability: Optional[float], band: ToneBand, attempt: int,
                        failures: Dict[str, str]) -> List[TweetCandidate]:
    count = resources.config.generation.tweet_count
    prompt = render_generation(probability, band, count, resources.templates, failures)
    reply = _exchange(session, trace, "generation", prompt, resources.tweet_params)
    try:
        candidates = parse_tweets(reply, count)
    except GenerationParseError as e:
        logger.info("Re-prompting generation for user '%s': %s", trace.user_id, e)
        reply = _exchange(session, trace, "generation", resources.templates["retry_format"], resources.tweet_params)
        candidates = parse_tweets(reply, count)
    for candidate in candidates:
        candidate.attempt = attempt
    return candidates


def retry_verified_generation(session: AgentSession, resources: PipelineResources, profile: UserProfile,
                              trace: StageTrace, probability: Optional[float], band: ToneBand
                              ) -> Tuple[List[TweetCandidate], Optional[ExpertVerdict], int, OutcomeStatus]:
    """
    Generate, verify, and regenerate with the failing experts' reasons
    appended, for 1 + max_retries attempts. When every attempt fails the
    last candidates are accepted unverified.
    """
    max_attempts = 1 + resources.config.thresholds.max_retries
    failures: Dict[str, str] = {}
    candidates: List[TweetCandidate] = []
    verdict: Optional[ExpertVerdict] = None
    for attempt in range(1, max_attempts + 1):
        candidates = generate_candidates(session, resources, trace, probability, band, attempt, failures)
        if not resources.config.ablation.expert_assessment:
            return candidates, None, attempt, OutcomeStatus.COMPLETED
        try:
            verdict = verify_tweets(resources, profile, probability, candidates, attempt, trace)
        except VerdictParseError as e:
            logger.info("Attempt %d for user '%s' has an unreadable verdict: %s", attempt, profile.user_id, e)
            verdict = None
            failures = {}
            continue
        if verdict.passed:
            for candidate in candidates:
                candidate.verified = True
            return candidates, verdict, attempt, OutcomeStatus.COMPLETED
        failures = verdict.failures()
        logger.debug("Attempt %d for user '%s' rejected by %s", attempt, profile.user_id, sorted(failures))
    return candidates, verdict, max_attempts, OutcomeStatus.UNVERIFIED_ACCEPTED


def run_user_pipeline(timeline: UserTimeline, profile: UserProfile, resources: PipelineResources) -> StageTrace:
    """
    Runs perception, risk perception, panic arousal and posting response in
    order for one user. Every error ends up in the trace outcome.
    """
    user_id = timeline.user_id
    trace = StageTrace(user_id)
    config = resources.config
    session = AgentSession(user_id, resources.provider)
    try:
        stage1 = render_stage1(resources.knowledge, resources.context, profile, resources.templates)[0]
        _exchange(session, trace, "perception", stage1.content, resources.reasoning_params)

        if config.ablation.risk_sensing:
            reply = _exchange(session, trace, "ppdts", render_ppdts(resources.items, resources.templates),
                              resources.reasoning_params)
            trace.ppdts = parse_ppdts(reply)
            if trace.ppdts.answered_count < config.thresholds.questionnaire_validity:
                trace.outcome = OutcomeStatus.INVALID_QUESTIONNAIRE
                trace.outcome_reason = f"{trace.ppdts.answered_count} of 18 questionnaire items answered"
                return trace

        if config.ablation.emotion_arousal:
            reply = _exchange(session, trace, "arousal", render_arousal(resources.templates),
                              resources.reasoning_params)
            try:
                factors, reported = parse_arousal(reply)
            except ArousalParseError as e:
                logger.info("Re-prompting arousal for user '%s': %s", user_id, e)
                reply = _exchange(session, trace, "arousal", resources.templates["retry_format"],
                                  resources.reasoning_params)
                factors, reported = parse_arousal(reply)
            trace.arousal = factors
            trace.assessment = assess_panic(factors, reported)
        else:
            trace.assessment = PanicAssessment(None, ProbabilitySource.ABSENT)

        probability = trace.assessment.probability
        band = tone_band(probability, config.thresholds.tone_calm_below, config.thresholds.tone_panic_above)
        candidates, verdict, attempts, status = retry_verified_generation(session, resources, profile, trace,
                                                                          probability, band)
        trace.candidates = candidates
        trace.verdict = verdict
        trace.attempts = attempts
        trace.outcome = status
    except ProviderRefusal as e:
        trace.outcome = OutcomeStatus.PROVIDER_REFUSED
        trace.outcome_reason = e.reason or str(e)
    except (AgentParseError, PanicForecastError) as e:
        logger.warning("Pipeline failed for user '%s': %s", user_id, e)
        trace.outcome = OutcomeStatus.FAILED
        trace.outcome_reason = f"{type(e).__name__}: {e}"
    return trace
