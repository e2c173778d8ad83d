# test_agent.py
# All comments and identifiers in English

import itertools
import random

import pytest
import requests

from panic_forecast_tool.agent.parsers import parse_arousal, parse_ppdts, parse_tweets, parse_verdict
from panic_forecast_tool.agent.pipeline import PipelineResources, run_user_pipeline
from panic_forecast_tool.agent.prompts import (
    PromptTemplates, format_percent, render, render_disaster_table, render_generation, render_stage1,
)
from panic_forecast_tool.agent.scoring import assess_panic, fallback_probability, tone_band
from panic_forecast_tool.data_models.agent_types import (
    AROUSAL_FACTOR_NAMES, ArousalFactors, DisasterContext, DisasterTrackPoint, EXPERT_NAMES, PsychKnowledge,
)
from panic_forecast_tool.data_models.common_types import ChatRole, OutcomeStatus, ProbabilitySource, ToneBand
from panic_forecast_tool.data_models.corpus_types import UserTimeline
from panic_forecast_tool.data_models.gateway_types import ProviderConfig, RetryPolicy
from panic_forecast_tool.data_models.profile_types import (
    PersonalityVector, RiskCommFeatures, SentimentTrend, ThemeProfile, ToneTriple, UserProfile,
)
from panic_forecast_tool.data_models.run_config import RunConfig
from panic_forecast_tool.errors import (
    ArousalParseError, GenerationParseError, InsufficientData, TemplateError, VerdictParseError,
)
from panic_forecast_tool.llm_gateway.providers import HttpProvider, MockProvider
from panic_forecast_tool.project_io.assets import load_ppdts_items, load_psych_knowledge

LANDFALL = 1351468800

# Replies from a recorded Hurricane Sandy session, copied verbatim.
SAMPLE_PPDTS = (
    "1. **Q1: 3** (User has interests in natural disasters and weather, indicating familiarity with preparedness "
    "materials, but emotional stability is not stable, suggesting some uncertainty.);\n"
    "2. **Q2: 2** (User's conscientiousness is above baseline, suggesting some preparedness knowledge, but "
    "agreeableness is below mean, indicating potential skepticism about adequacy.);\n"
    "3. **Q3: x** ……"
)
SAMPLE_AROUSAL = (
    "**Awareness: 4/5** (User has interests in natural disasters and weather, indicating deep awareness of "
    "hurricane dangers, but emotional stability is not stable, suggesting some uncertainty.);\n"
    "**Coping: 3/5** (User's extraversion and openness suggest moderate confidence in handling crises, but "
    "emotional stability is not stable, indicating some difficulty in managing responses.);\n"
    "**Uncertainty: 3/5** (User's openness and interests suggest some understanding of risks, but emotional "
    "stability is not stable, indicating partial uncertainty.);\n"
    "**Novelty: 3/5** (User's interests in natural disasters and weather suggest some prior exposure, but no "
    "explicit indication of extensive experience.)\n"
    "**[55%]**"
)
SAMPLE_TWEET = ("Stay safe everyone! The hurricane is getting stronger—winds up to 155 km/h now. "
                "I’m prepping supplies and staying informed. Let’s all follow safety guidelines and "
                "look out for each other. #HurricaneAlert #StayPrepared #WeatherUpdate")
SAMPLE_VERDICT = (
    "**Psychological: YES** (The tweet aligns with the user's psychological profile, as the user has an "
    "interest in natural disasters and a conscientiousness score above the threshold, indicating a tendency "
    "to follow safety protocols.);\n"
    "**Linguistic: YES** (The tweet's language style is consistent with the user's historical style, which "
    "includes informative and promotional tones.);\n"
    "**Factual: YES** (The tweet is relevant to Hurricane Sandy and factually accurate, as the hurricane was "
    "indeed intensifying during the time period referenced.);\n"
    "**Panic: YES** (The tweet aligns with the user's panic probability value of **55%**, showing neutral "
    "concern without panic, which is appropriate for the given probability range.)"
)

LIST_PREFIXES = ["", "- ", "* ", "{n}. ", "{n}) "]
FACTOR_LABELS = {
    "awareness": ["Awareness", "Awareness of Danger"],
    "coping": ["Coping", "Coping Efficacy and Sense of Control"],
    "uncertainty": ["Uncertainty", "Uncertainty of Risk"],
    "novelty": ["Novelty", "Novelty of Risk"],
}
EXPERT_LABELS = {
    "psychological": ["Psychological", "Psychological Validation"],
    "linguistic": ["Linguistic", "Linguistic Validation"],
    "factual": ["Factual", "Factual Validation"],
    "emotional": ["Panic", "Panic Probability Alignment", "Emotional"],
}


# ── Helpers ───────────────────────────────────────────────────────────────────

def _line(rng, n, body, reason):
    prefix = rng.choice(LIST_PREFIXES).format(n=n)
    if rng.random() < 0.5:
        body = f"**{body}**"
    return f"{prefix}{body} ({reason}){rng.choice(['', ';'])}"


def ppdts_text(scores, count=None):
    lines = [f"{i}. **Q{i}: {scores[i - 1] if scores else 3}** (reason {i})" for i in range(1, (count or 18) + 1)]
    return "\n".join(lines)


def arousal_text(scores=(4, 3, 3, 3), percent=55):
    names = ("Awareness", "Coping", "Uncertainty", "Novelty")
    lines = [f"**{name}: {score}/5** (reason);" for name, score in zip(names, scores)]
    if percent is not None:
        lines.append(f"**[{percent}%]**")
    return "\n".join(lines)


def tweets_text(*tweets):
    return "\n".join(f"[{t}]" for t in tweets) + "\n### End"


def verdict_text(failing=None, reason="does not fit"):
    lines = []
    for label, expert in (("Psychological", "psychological"), ("Linguistic", "linguistic"),
                          ("Factual", "factual"), ("Panic", "emotional")):
        if expert == failing:
            lines.append(f"**{label}: NO** ({reason})")
        else:
            lines.append(f"**{label}: YES** (fine)")
    return "\n".join(lines)


def reply(text):
    return {"reply": text}


def make_profile(user_id="u1"):
    return UserProfile(user_id, None, None, None, ToneTriple("direct", "casual", "warm"),
                       RiskCommFeatures(120, 80, 2.5, 15.0), relevant_posts=["storm is coming"])


def make_context():
    return DisasterContext("Hurricane Sandy", [
        DisasterTrackPoint(LANDFALL - 86400, 35.3, -73.2, 140, 946, "H1"),
        DisasterTrackPoint(LANDFALL, 39.4, -74.4, 130, 946, "ET"),
    ], LANDFALL)


def make_resources(sessions, config=None):
    provider = MockProvider({"sessions": sessions})
    resources = PipelineResources(load_psych_knowledge(), make_context(), load_ppdts_items(),
                                  PromptTemplates.load(), provider, config or RunConfig())
    return resources, provider


def run(sessions, config=None, user_id="u1"):
    resources, provider = make_resources(sessions, config)
    trace = run_user_pipeline(UserTimeline(user_id), make_profile(user_id), resources)
    return trace, provider


class BrokenBodySession:
    """HTTP session whose every response body is cut off mid-stream."""
    def __init__(self):
        self.calls = 0

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls += 1
        raise requests.exceptions.ChunkedEncodingError("Connection broken: IncompleteRead(0 bytes read)")


def happy_chain(arousal=None, generation=None):
    return [reply("Understood, answering as the user."), reply(ppdts_text(None)),
            reply(arousal or arousal_text()), reply(generation or tweets_text("Winds picking up, stay safe #Sandy"))]


# ── Parsers ───────────────────────────────────────────────────────────────────

class TestParsePPDTS:
    def test_example_reply(self):
        response = parse_ppdts(SAMPLE_PPDTS)
        assert response.scores == {1: 3, 2: 2}
        assert response.reasons[1] == ("User has interests in natural disasters and weather, indicating "
                                       "familiarity with preparedness materials, but emotional stability is not "
                                       "stable, suggesting some uncertainty.")
        assert response.reasons[2] == ("User's conscientiousness is above baseline, suggesting some preparedness "
                                       "knowledge, but agreeableness is below mean, indicating potential "
                                       "skepticism about adequacy.")
        assert response.answered_count == 2
        assert not response.valid

    def test_round_trip(self):
        rng = random.Random(1)
        for _ in range(500):
            items = rng.sample(range(1, 19), rng.randint(0, 18))
            expected = {i: rng.randint(1, 4) for i in items}
            separators = [":", ".", "-"]
            lines = [_line(rng, i, f"Q{i}{rng.choice(separators)} {score}", f"because {i}")
                     for i, score in expected.items()]
            if rng.random() < 0.3:
                lines.insert(0, "Here are my answers as the user:")
            response = parse_ppdts("\n".join(lines))
            assert response.scores == expected
            assert response.reasons == {i: f"because {i}" for i in expected}
            assert response.valid == (len(expected) == 18)

    def test_out_of_range_and_repeated_items_ignored(self):
        response = parse_ppdts("Q1: 5\nQ19: 2\nQ2: 3\nQ2: 1")
        assert response.scores == {2: 3}

    def test_first_line_claims_item_even_when_out_of_range(self):
        assert parse_ppdts("Q2: 7\nQ2: 3").scores == {}
        assert parse_ppdts("Q2: 0 (unsure)\nQ2: 3 (sure)\nQ4: 4").scores == {4: 4}
        response = parse_ppdts("Q5: 2 (first)\nQ5: 9 (second)")
        assert response.scores == {5: 2}
        assert response.reasons == {5: "first"}

    def test_empty_reply(self):
        assert parse_ppdts("").answered_count == 0


class TestParseArousal:
    def test_example_reply(self):
        factors, reported = parse_arousal(SAMPLE_AROUSAL)
        assert factors.as_tuple() == (4, 3, 3, 3)
        assert reported == pytest.approx(0.55)
        assert factors.reasons["novelty"] == ("User's interests in natural disasters and weather suggest some "
                                              "prior exposure, but no explicit indication of extensive experience.")
        assert factors.reasons["coping"].startswith("User's extraversion and openness")
        assessment = assess_panic(factors, reported)
        assert assessment.probability == pytest.approx(0.55)
        assert assessment.source == ProbabilitySource.LLM_REPORTED
        assert tone_band(assessment.probability) == ToneBand.PANICKED

    def test_round_trip(self):
        rng = random.Random(2)
        for _ in range(500):
            scores = {name: rng.randint(1, 5) for name in AROUSAL_FACTOR_NAMES}
            lines = [_line(rng, n, f"{rng.choice(FACTOR_LABELS[name])}: {score}/5", f"about {name}")
                     for n, (name, score) in enumerate(scores.items(), start=1)]
            rng.shuffle(lines)
            percent = rng.choice([None, rng.randint(0, 100), round(rng.uniform(0, 100), 1)])
            if percent is not None:
                lines.append(rng.choice([f"**[{percent}%]**", f"Panic probability: [{percent}%]"]))
            factors, reported = parse_arousal("\n".join(lines))
            assert factors.scores == scores
            assert factors.reasons == {name: f"about {name}" for name in AROUSAL_FACTOR_NAMES}
            if percent is None:
                assert reported is None
            else:
                assert reported == pytest.approx(percent / 100.0)

    def test_score_out_of_range(self):
        with pytest.raises(ArousalParseError):
            parse_arousal(arousal_text((7, 2, 2, 2)))

    def test_missing_factor(self):
        with pytest.raises(ArousalParseError):
            parse_arousal("Awareness: 3/5\nCoping: 3/5\nNovelty: 3/5")

    def test_last_percentage_wins_and_over_100_ignored(self):
        _, reported = parse_arousal(arousal_text(percent=None) + "\n[40%] then [60%]")
        assert reported == pytest.approx(0.6)
        _, reported = parse_arousal(arousal_text(percent=None) + "\n[150%]")
        assert reported is None


class TestParseTweets:
    def test_example_reply(self):
        [tweet] = parse_tweets(f"[{SAMPLE_TWEET}]\n### End", 1)
        assert tweet.text == SAMPLE_TWEET
        assert tweet.hashtags == ["#HurricaneAlert", "#StayPrepared", "#WeatherUpdate"]

    def test_example_reply_without_framing_is_rejected(self):
        with pytest.raises(GenerationParseError):
            parse_tweets(SAMPLE_TWEET, 1)
        with pytest.raises(GenerationParseError):
            parse_tweets(SAMPLE_TWEET + "\n### End", 1)

    def test_round_trip(self):
        rng = random.Random(3)
        words = ["storm", "wind", "rain", "safe", "home", "power", "flood", "OMG", "help"]
        for _ in range(500):
            tweets = []
            for _ in range(rng.randint(1, 4)):
                text = " ".join(rng.choice(words) for _ in range(rng.randint(2, 8)))
                if rng.random() < 0.5:
                    text += f" #{rng.choice(words)}"
                tweets.append(text)
            n = rng.choice([1, 3])
            text = tweets_text(*tweets) + "\n[not part of the answer]"
            parsed = parse_tweets(text, n)
            assert [c.text for c in parsed] == tweets[:n]

    def test_missing_terminator(self):
        with pytest.raises(GenerationParseError):
            parse_tweets("[Stay safe]", 1)

    def test_no_bracketed_tweet(self):
        with pytest.raises(GenerationParseError):
            parse_tweets("Stay safe everyone\n### End", 1)


class TestParseVerdict:
    def test_example_reply(self):
        verdict = parse_verdict(SAMPLE_VERDICT)
        assert verdict.passed
        assert set(verdict.judgements) == set(EXPERT_NAMES)
        assert verdict.failures() == {}
        assert verdict.judgements["linguistic"].reason == (
            "The tweet's language style is consistent with the user's historical style, which includes "
            "informative and promotional tones.")
        assert verdict.judgements["emotional"].reason.startswith("The tweet aligns with the user's panic "
                                                                 "probability value of 55%, showing")

    def test_round_trip(self):
        rng = random.Random(4)
        for _ in range(500):
            outcomes = {name: rng.random() < 0.7 for name in EXPERT_NAMES}
            lines = []
            for n, (name, passed) in enumerate(outcomes.items(), start=1):
                word = rng.choice(["YES", "Yes", "yes"]) if passed else rng.choice(["NO", "No", "no"])
                lines.append(_line(rng, n, f"{rng.choice(EXPERT_LABELS[name])}: {word}", f"{name} check"))
            rng.shuffle(lines)
            verdict = parse_verdict("\n".join(lines))
            assert {name: j.passed for name, j in verdict.judgements.items()} == outcomes
            assert verdict.passed == all(outcomes.values())
            assert verdict.failures() == {name: f"{name} check" for name, ok in outcomes.items() if not ok}

    def test_missing_expert(self):
        with pytest.raises(VerdictParseError):
            parse_verdict("Psychological: YES\nLinguistic: YES\nFactual: NO")


# ── Scoring ───────────────────────────────────────────────────────────────────

def factors(*scores):
    return ArousalFactors(dict(zip(AROUSAL_FACTOR_NAMES, scores)))


class TestFallbackProbability:
    def test_known_values(self):
        assert fallback_probability(factors(4, 3, 3, 3)) == pytest.approx(0.5625)
        assert fallback_probability(factors(1, 1, 1, 1)) == 0.0
        assert fallback_probability(factors(5, 5, 5, 5)) == pytest.approx(1.0)

    def test_monotone_over_all_score_tuples(self):
        for scores in itertools.product(range(1, 6), repeat=4):
            base = fallback_probability(factors(*scores))
            assert 0.0 <= base <= 1.0
            for i in range(4):
                if scores[i] < 5:
                    bumped = list(scores)
                    bumped[i] += 1
                    assert fallback_probability(factors(*bumped)) > base

    def test_reported_value_preferred(self):
        assessment = assess_panic(factors(4, 3, 3, 3), 0.55)
        assert assessment.source == ProbabilitySource.LLM_REPORTED
        assert assessment.probability == 0.55
        assessment = assess_panic(factors(4, 3, 3, 3), None)
        assert assessment.source == ProbabilitySource.FALLBACK_FORMULA
        assert assessment.probability == pytest.approx(0.5625)


class TestToneBand:
    @pytest.mark.parametrize("probability, band", [
        (0.0, ToneBand.CALM), (0.4899, ToneBand.CALM), (0.49, ToneBand.NEUTRAL), (0.5, ToneBand.NEUTRAL),
        (0.51, ToneBand.NEUTRAL), (0.5101, ToneBand.PANICKED), (1.0, ToneBand.PANICKED), (None, ToneBand.NEUTRAL),
    ])
    def test_bands(self, probability, band):
        assert tone_band(probability) == band

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            tone_band(1.2)


# ── Prompts ───────────────────────────────────────────────────────────────────

class TestPrompts:
    def test_missing_placeholder(self):
        with pytest.raises(TemplateError):
            render("demo", "Hello {name} from {place}", {"name": "x"})

    def test_single_pass_substitution(self):
        assert render("demo", "{a} {b}", {"a": "{b}", "b": "x"}) == "{b} x"

    def test_empty_disaster_context(self):
        with pytest.raises(InsufficientData):
            render_disaster_table(DisasterContext("Hurricane Sandy", []))

    def test_disaster_table_rows(self):
        table = render_disaster_table(make_context())
        assert "| 2012-10-29 00:00 | 39.40 | -74.40 | 130 | 946 | ET |" in table

    def test_format_percent(self):
        assert format_percent(0.55) == "55"
        assert format_percent(0.5625) == "56.25"
        assert format_percent(None) == "unknown"

    def test_generation_style_follows_band(self):
        templates = PromptTemplates.load()
        panicked = render_generation(0.8, ToneBand.PANICKED, 1, templates)
        calm = render_generation(0.2, ToneBand.CALM, 1, templates)
        neutral = render_generation(0.5, ToneBand.NEUTRAL, 1, templates)
        assert templates["style_panicked"] in panicked
        assert templates["style_calm"] in calm
        assert templates["style_panicked"] not in neutral and templates["style_calm"] not in neutral

    def test_stage1_prompt_golden(self):
        knowledge = PsychKnowledge({
            "Public Risk Perception Formation": "Risk perception grows with proximity.",
            "Personality Traits and Risk Response": "Neuroticism amplifies threat appraisal.",
            "Social Media Language Style Effects": "Emphatic style spreads alarm.",
            "Content Type Emotional Impacts": "Images of damage raise fear.",
            "Emotional Stability Mechanisms": "Stable users regulate faster.",
            "Social Media Network Property Roles": "Large audiences amplify posts.",
        })
        profile = UserProfile("u1", PersonalityVector(0.62, 0.71, 0.4, 0.35, 0.58),
                              SentimentTrend(0.25, 0.5, 0.25),
                              ThemeProfile([0, 0.75, 0, 0, 0, 0.25, 0, 0],
                                           ["Natural Disasters & Weather", "Society & News"]),
                              ToneTriple("direct", "casual", "warm"), RiskCommFeatures(120, 80, 2.5, 15.04),
                              relevant_posts=["storm is coming"])
        [message] = render_stage1(knowledge, make_context(), profile, PromptTemplates.load())
        assert message.role == ChatRole.USER
        assert message.content == (
            "You are a psychologist specializing in predicting public emotional trends during emergencies. "
            "Use these resources:\n"
            "1. Psychological Principles: Public Risk Perception Formation:\n"
            "Risk perception grows with proximity.\n"
            "Personality Traits and Risk Response:\n"
            "Neuroticism amplifies threat appraisal.\n"
            "Social Media Language Style Effects:\n"
            "Emphatic style spreads alarm.\n"
            "Content Type Emotional Impacts:\n"
            "Images of damage raise fear.\n"
            "Emotional Stability Mechanisms:\n"
            "Stable users regulate faster.\n"
            "Social Media Network Property Roles:\n"
            "Large audiences amplify posts.\n"
            "2. Hurricane monitoring data (Markdown): "
            "| Time (UTC) | Latitude | Longitude | Max wind (km/h) | Pressure (hPa) | Category |\n"
            "|---|---|---|---|---|---|\n"
            "| 2012-10-28 00:00 | 35.30 | -73.20 | 140 | 946 | H1 |\n"
            "| 2012-10-29 00:00 | 39.40 | -74.40 | 130 | 946 | ET |\n"
            "3. User Profile (JSON): {\n"
            '  "personality": {\n'
            '    "openness": 0.62,\n'
            '    "conscientiousness": 0.71,\n'
            '    "extraversion": 0.4,\n'
            '    "agreeableness": 0.35,\n'
            '    "neuroticism": 0.58\n'
            "  },\n"
            '  "sentiment": {\n'
            '    "positive": "25.0%",\n'
            '    "neutral": "50.0%",\n'
            '    "negative": "25.0%"\n'
            "  },\n"
            '  "interests": [\n'
            '    "Natural Disasters & Weather",\n'
            '    "Society & News"\n'
            "  ],\n"
            '  "tone": "direct, casual, warm",\n'
            '  "followers": 120,\n'
            '  "followees": 80,\n'
            '  "postsPerDay": 2.5,\n'
            '  "distanceToTrackKm": 15.0,\n'
            '  "relevantPosts": [\n'
            '    "storm is coming"\n'
            "  ]\n"
            "}\n"
            "\n"
            "Please always:\n"
            "1. Directly output the final answer;\n"
            "2. Disable any thought process;\n"
            "3. Use plain text format."
        )


# ── Pipeline ──────────────────────────────────────────────────────────────────

class TestRunUserPipeline:
    def test_happy_path(self):
        trace, provider = run({"u1": happy_chain(), "u1/expert/1": [reply(verdict_text())]})
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.attempts == 1
        assert trace.ppdts.valid
        assert trace.arousal.as_tuple() == (4, 3, 3, 3)
        assert trace.assessment.to_dict() == {"probability": pytest.approx(0.55), "source": "llm-reported"}
        assert [c.text for c in trace.candidates] == ["Winds picking up, stay safe #Sandy"]
        assert all(c.verified for c in trace.candidates)
        assert [p["stage"] for p in trace.prompts] == ["perception", "ppdts", "arousal", "generation",
                                                       "verification"]

    def test_sampling_parameters_per_stage(self):
        _, provider = run({"u1": happy_chain(), "u1/expert/1": [reply(verdict_text())]})
        bodies = [call["body"] for call in provider.calls_for("u1")]
        assert [b["temperature"] for b in bodies] == [0.4, 0.4, 0.4, 0.7]
        assert bodies[3]["frequency_penalty"] == 0.4
        assert "frequency_penalty" not in bodies[0]
        assert provider.calls_for("u1/expert/1")[0]["body"]["temperature"] == 0.4
        # The expert panel never sees the user's chain.
        expert_roles = [m["role"] for m in provider.calls_for("u1/expert/1")[0]["body"]["messages"]]
        assert expert_roles == ["system", "user"]

    def test_incomplete_questionnaire_stops_chain(self):
        chain = [reply("ok"), reply(ppdts_text(None, count=17))]
        trace, provider = run({"u1": chain})
        assert trace.outcome == OutcomeStatus.INVALID_QUESTIONNAIRE
        assert trace.ppdts.answered_count == 17
        assert len(provider.calls_for("u1")) == 2
        assert trace.candidates == []

    def test_refusal(self):
        trace, _ = run({"u1": [reply("ok"), reply(ppdts_text(None)), {"refusal": "blocked"}]})
        assert trace.outcome == OutcomeStatus.PROVIDER_REFUSED
        assert trace.outcome_reason == "blocked"

    def test_transport_failure_marks_user_failed(self):
        trace, provider = run({"u1": [reply("ok"), {"error": "connection reset"}]})
        assert trace.outcome == OutcomeStatus.FAILED
        assert trace.outcome_reason.startswith("TransportError: connection reset")
        assert len(provider.calls_for("u1")) == 2

    def test_broken_http_body_marks_user_failed(self, monkeypatch):
        monkeypatch.setenv("PANIC_FORECAST_TEST_TOKEN", "secret-token")
        config = ProviderConfig(endpoint_url="https://llm.example/v1/chat/completions",
                                token_env_var="PANIC_FORECAST_TEST_TOKEN", model_id="test-model",
                                retry=RetryPolicy(1, 0.0, 0.0))
        http = BrokenBodySession()
        resources = PipelineResources(load_psych_knowledge(), make_context(), load_ppdts_items(),
                                      PromptTemplates.load(), HttpProvider(config, http_session=http), RunConfig())
        trace = run_user_pipeline(UserTimeline("u1"), make_profile("u1"), resources)
        assert trace.outcome == OutcomeStatus.FAILED
        assert trace.outcome_reason.startswith("TransportError: ")
        assert "after 2 attempt(s)" in trace.outcome_reason
        assert http.calls == 2

    def test_arousal_format_retry(self):
        chain = happy_chain()
        chain.insert(2, reply(arousal_text((7, 2, 2, 2))))
        trace, _ = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]})
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert [p["stage"] for p in trace.prompts].count("arousal") == 2

    def test_arousal_unreadable_twice_fails(self):
        chain = [reply("ok"), reply(ppdts_text(None)), reply("no scores"), reply("still no scores")]
        trace, _ = run({"u1": chain})
        assert trace.outcome == OutcomeStatus.FAILED
        assert "ArousalParseError" in trace.outcome_reason

    def test_generation_format_retry(self):
        chain = happy_chain(generation="[forgot the terminator]")
        chain.append(reply(tweets_text("Second try #Sandy")))
        trace, _ = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]})
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.candidates[0].text == "Second try #Sandy"

    def test_fallback_probability_used_without_percentage(self):
        chain = happy_chain(arousal=arousal_text((4, 3, 3, 3), percent=None))
        trace, _ = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]})
        assert trace.assessment.source == ProbabilitySource.FALLBACK_FORMULA
        assert trace.panic_probability == pytest.approx(0.5625)

    def test_regeneration_carries_expert_feedback(self):
        chain = happy_chain()
        chain.append(reply(tweets_text("Second attempt, less formal #Sandy")))
        sessions = {"u1": chain,
                    "u1/expert/1": [reply(verdict_text("linguistic", "too formal for this user"))],
                    "u1/expert/2": [reply(verdict_text())]}
        trace, provider = run(sessions)
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.attempts == 2
        assert trace.retry_count == 1
        assert trace.candidates[0].attempt == 2
        second_prompt = provider.calls_for("u1")[4]["body"]["messages"][-1]["content"]
        assert "Linguistic: too formal for this user" in second_prompt

    def test_unverified_after_all_attempts(self):
        chain = happy_chain() + [reply(tweets_text(f"Attempt {i} #Sandy")) for i in range(2, 5)]
        sessions = {"u1": chain}
        for attempt in range(1, 5):
            sessions[f"u1/expert/{attempt}"] = [reply(verdict_text("factual", "wrong city"))]
        trace, provider = run(sessions)
        assert trace.outcome == OutcomeStatus.UNVERIFIED_ACCEPTED
        assert trace.attempts == 4
        assert trace.candidates[0].text == "Attempt 4 #Sandy"
        assert not trace.candidates[0].verified
        assert provider.calls_for("u1/expert/5") == []

    def test_max_retries_zero(self):
        config = RunConfig()
        config.thresholds.max_retries = 0
        sessions = {"u1": happy_chain(), "u1/expert/1": [reply(verdict_text("factual"))]}
        trace, _ = run(sessions, config)
        assert trace.outcome == OutcomeStatus.UNVERIFIED_ACCEPTED
        assert trace.attempts == 1

    def test_unreadable_verdict_counts_as_attempt(self):
        chain = happy_chain() + [reply(tweets_text("Again #Sandy"))]
        sessions = {"u1": chain, "u1/expert/1": [reply("I liked it.")], "u1/expert/2": [reply(verdict_text())]}
        trace, _ = run(sessions)
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.attempts == 2

    def test_three_tweets(self):
        config = RunConfig()
        config.generation.tweet_count = 3
        chain = happy_chain(generation=tweets_text("one #a", "two", "three", "four"))
        trace, provider = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]}, config)
        assert [c.text for c in trace.candidates] == ["one #a", "two", "three"]
        verify_prompt = provider.calls_for("u1/expert/1")[0]["body"]["messages"][-1]["content"]
        assert "[one #a] [two] [three]" in verify_prompt


class TestAblations:
    def test_without_expert_assessment(self):
        config = RunConfig()
        config.ablation.expert_assessment = False
        trace, provider = run({"u1": happy_chain()}, config)
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.verdict is None
        assert provider.calls_for("u1/expert/1") == []
        assert not trace.candidates[0].verified

    def test_without_emotion_arousal(self):
        config = RunConfig()
        config.ablation.emotion_arousal = False
        chain = [reply("ok"), reply(ppdts_text(None)), reply(tweets_text("Just rain #Sandy"))]
        trace, provider = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]}, config)
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.assessment.source == ProbabilitySource.ABSENT
        assert trace.panic_probability is None
        assert "arousal" not in [p["stage"] for p in trace.prompts]

    def test_without_risk_sensing(self):
        config = RunConfig()
        config.ablation.risk_sensing = False
        chain = [reply("ok"), reply(arousal_text()), reply(tweets_text("Windy #Sandy"))]
        trace, _ = run({"u1": chain, "u1/expert/1": [reply(verdict_text())]}, config)
        assert trace.outcome == OutcomeStatus.COMPLETED
        assert trace.ppdts is None
        assert [p["stage"] for p in trace.prompts][:2] == ["perception", "arousal"]
