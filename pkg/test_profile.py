# test_profile.py
# All comments and identifiers in English

import hashlib
import math
import random
import re

import numpy as np
import pytest
import requests

from panic_forecast_tool.data_models.agent_types import DisasterContext, DisasterTrackPoint
from panic_forecast_tool.data_models.common_types import MISCELLANEOUS_THEME_INDEX, THEME_NAMES, ThemeMode
from panic_forecast_tool.data_models.corpus_types import RawPost, UserTimeline
from panic_forecast_tool.data_models.gateway_types import GenerationParams
from panic_forecast_tool.data_models.profile_types import ThemeMembership, TopicDistribution
from panic_forecast_tool.errors import FeatureUnavailable, InsufficientData, RetryableParseError, ToneUnavailable
from panic_forecast_tool.llm_gateway.providers import MockProvider
from panic_forecast_tool.profile.builder import (
    FLAG_LOCATION, FLAG_PERSONALITY, FLAG_SENTIMENT, FLAG_TONE, FLAG_TOPICS_OOV, ProfileScorers, build_profile,
    distance_to_track, haversine_km, posts_per_day,
)
from panic_forecast_tool.profile.personality import (
    ExternalPersonalityScorer, LexiconPersonalityScorer, LlmPersonalityScorer, check_personality_consistency,
    parse_trait_lines, score_personality,
)
from panic_forecast_tool.profile.retrieval import RETRIEVAL_TOKEN_PATTERN, retrieve_relevant
from panic_forecast_tool.profile.sentiment import (
    NEGATIVE, NEUTRAL, POSITIVE, LexiconSentimentClassifier, LlmSentimentClassifier, sentiment_trend,
)
from panic_forecast_tool.profile.themes import (
    consolidate_themes, parse_theme_assignments, static_assignments, theme_profile,
)
from panic_forecast_tool.profile.tone import extract_tone, parse_tone
from panic_forecast_tool.profile.topic_model import (
    TopicModel, fit_lda, infer_topics, model_cache_key, tokenize_for_topics,
)
from panic_forecast_tool.project_io.assets import (
    load_sentiment_lexicon, load_stopwords, load_theme_config, load_trait_lexicon,
)

DAY = 86400
START = 1350000000
WEATHER = ["hurricane", "storm", "wind", "rain", "flood", "surge", "coast", "tide"]
SPORTS = ["giants", "yankees", "game", "season", "score", "coach", "playoff", "stadium"]
FILLER = ["today", "really", "think", "people", "going", "maybe", "still", "again"]
PARAMS = GenerationParams()


# ── Helpers ───────────────────────────────────────────────────────────────────

def make_posts(texts, user_id="u1", step=DAY, **coordinates):
    return [RawPost(f"{user_id}-{i:02d}", user_id, START + i * step, text, **coordinates)
            for i, text in enumerate(texts)]


def two_topic_corpus(rng, per_topic=40, length=10):
    documents, labels = [], []
    for label, vocabulary in enumerate((WEATHER, SPORTS)):
        for _ in range(per_topic):
            documents.append(" ".join(rng.choice(vocabulary) for _ in range(length)))
            labels.append(label)
    return documents, labels


@pytest.fixture(scope="module")
def two_topic_model():
    documents, labels = two_topic_corpus(random.Random(8))
    return fit_lda(documents, k=2, iterations=80, seed=3, alpha=0.1), labels


def oracle_static(topic_keywords, theme_config):
    seeds = {}
    for entry in theme_config["themes"]:
        seeds[THEME_NAMES.index(entry["name"])] = {w.lower() for w in entry["keywords"]}
    result = []
    for keywords in topic_keywords:
        overlaps = [len(set(keywords) & seeds.get(t, set())) for t in range(len(THEME_NAMES))]
        best = max(overlaps)
        result.append(overlaps.index(best) if best > 0 else MISCELLANEOUS_THEME_INDEX)
    return result


def oracle_retrieval(posts, query_terms, k):
    tokenized = [re.findall(RETRIEVAL_TOKEN_PATTERN, p.text.lower()) for p in posts]
    n = len(posts)
    scores = []
    for tokens in tokenized:
        score = 0.0
        for term in query_terms:
            tf = tokens.count(term)
            if tf:
                df = sum(1 for other in tokenized if term in other)
                score += tf * (math.log((1 + n) / (1 + df)) + 1.0)
        scores.append(score)
    ranked = sorted((i for i in range(n) if scores[i] > 0),
                    key=lambda i: (-scores[i], -posts[i].timestamp, posts[i].post_id))
    return [posts[i].post_id for i in ranked[:k]]


def track_context():
    return DisasterContext("Hurricane Sandy", [
        DisasterTrackPoint(START, 35.3, -73.2, 140, 946, "H1"),
        DisasterTrackPoint(START + DAY, 39.4, -74.4, 130, 946, "ET"),
    ])


# ── Topic model ───────────────────────────────────────────────────────────────

class TestTopicModel:
    def test_recovers_two_separated_topics(self, two_topic_model):
        model, labels = two_topic_model
        assigned = np.argmax(model.document_mixtures(), axis=1)
        purity = sum(max(sum(1 for a, l in zip(assigned, labels) if a == topic and l == label)
                         for label in (0, 1)) for topic in (0, 1)) / len(labels)
        assert purity >= 0.9

    def test_distributions_are_simplices(self, two_topic_model):
        model, _ = two_topic_model
        assert np.allclose(model.phi().sum(axis=1), 1.0)
        assert np.allclose(model.document_mixtures().sum(axis=1), 1.0)
        assert (model.phi() > 0).all()

    def test_keywords_separate_topics(self, two_topic_model):
        model, _ = two_topic_model
        keywords = model.top_keywords(4)
        weather_topic = 0 if keywords[0][0] in WEATHER else 1
        assert set(keywords[weather_topic]) <= set(WEATHER)
        assert set(keywords[1 - weather_topic]) <= set(SPORTS)

    def test_same_seed_same_model(self):
        documents, _ = two_topic_corpus(random.Random(1), per_topic=10)
        first = fit_lda(documents, k=3, iterations=10, seed=5)
        second = fit_lda(documents, k=3, iterations=10, seed=5)
        assert first.to_dict() == second.to_dict()

    def test_serialization_keeps_phi(self, two_topic_model):
        model, _ = two_topic_model
        restored = TopicModel.from_dict(model.to_dict())
        assert np.array_equal(restored.phi(), model.phi())
        assert restored.top_keywords() == model.top_keywords()

    def test_inference_favors_matching_topic(self, two_topic_model):
        model, _ = two_topic_model
        keywords = model.top_keywords(4)
        weather_topic = 0 if keywords[0][0] in WEATHER else 1
        theta = infer_topics(model, ["storm wind rain flood", "hurricane surge coast", "giants game"],
                             iterations=20, seed=1)
        assert sum(theta.weights) == pytest.approx(1.0)
        assert theta.weights[weather_topic] == pytest.approx(2 / 3)
        assert not theta.out_of_vocabulary

    def test_out_of_vocabulary_user_is_uniform(self, two_topic_model):
        model, _ = two_topic_model
        theta = infer_topics(model, ["completely unrelated words", ""], seed=1)
        assert theta.weights == [0.5, 0.5]
        assert theta.out_of_vocabulary

    def test_cache_key(self):
        stopwords = frozenset({"the"})
        key = model_cache_key(["a b", "c d"], 25, 500, 1, 2.0, 0.01, stopwords)
        assert key == model_cache_key(["c d", "a b"], 25, 500, 1, 2.0, 0.01, stopwords)
        assert key != model_cache_key(["a b", "c d"], 25, 500, 2, 2.0, 0.01, stopwords)
        assert key != model_cache_key(["a b", "c d"], 25, 500, 1, 2.0, 0.01, frozenset())

    def test_rejects_empty_inputs(self):
        with pytest.raises(InsufficientData):
            fit_lda([], k=2)
        with pytest.raises(InsufficientData):
            fit_lda(["the and"], k=2, stopwords=frozenset({"the", "and"}))
        with pytest.raises(ValueError):
            fit_lda(["storm"], k=1)

    def test_tokenizer_drops_stopwords_and_short_tokens(self):
        assert tokenize_for_topics("The STORM is a 2nd x hit", frozenset({"the", "is"})) == ["storm", "nd", "hit"]
        assert "the" in load_stopwords()


# ── Themes ────────────────────────────────────────────────────────────────────

class TestThemes:
    def test_static_examples(self):
        config = load_theme_config()
        topics = [["gas"], ["xyz"], ["hurricane", "storm"], ["giants", "jets", "debate"]]
        assert static_assignments(topics, config) == [2, MISCELLANEOUS_THEME_INDEX, 1, 3]

    def test_static_matches_oracle(self):
        config = load_theme_config()
        vocabulary = sorted({w for entry in config["themes"] for w in entry["keywords"]} | set(FILLER))
        rng = random.Random(9)
        for _ in range(200):
            topics = [rng.sample(vocabulary, rng.randint(1, 10)) for _ in range(rng.randint(1, 12))]
            assert static_assignments(topics, config) == oracle_static(topics, config)

    def test_explicit_assignment_wins(self):
        config = dict(load_theme_config(), assignments={"0": "Sports and Entertainment"})
        assert static_assignments([["hurricane", "storm"]], config) == [3]

    def test_unknown_theme_in_config(self):
        with pytest.raises(ValueError):
            static_assignments([["a"]], {"themes": [{"name": "Cooking", "keywords": ["a"]}]})

    def test_parse_assignments(self):
        reply = "**Topic 1:** Natural Disasters & Weather\nTopic #2 - sports and entertainment\nTopic 9: Society & News"
        assert parse_theme_assignments(reply, 2) == [1, 3]
        with pytest.raises(RetryableParseError):
            parse_theme_assignments("Topic 1: Weather", 1)
        with pytest.raises(RetryableParseError):
            parse_theme_assignments("Topic 1: Miscellaneous", 2)

    def test_llm_consolidation_with_retry(self):
        provider = MockProvider({"sessions": {"themes": [
            {"reply": "Topic 1: Natural Disasters & Weather"},
            {"reply": "Topic 1: Natural Disasters & Weather\nTopic 2: Politics & Elections"},
        ]}})
        gamma = consolidate_themes([["storm"], ["vote"]], ThemeMode.LLM, load_theme_config(), provider,
                                   "{topic_keywords}\n{theme_names}", "retry", PARAMS)
        assert gamma.assignments() == [1, 0]
        assert "Topic 2: vote" in provider.calls_for("themes")[0]["body"]["messages"][0]["content"]

    def test_llm_failure_falls_back_to_static(self):
        provider = MockProvider({"sessions": {"themes": [{"refusal": "no"}]}})
        gamma = consolidate_themes([["storm", "hurricane"], ["xyz"]], ThemeMode.LLM, load_theme_config(), provider,
                                   "{topic_keywords}", "retry", PARAMS)
        assert gamma.assignments() == [1, MISCELLANEOUS_THEME_INDEX]

    def test_theme_profile(self):
        gamma = ThemeMembership.from_assignments([1, 3, 1])
        profile = theme_profile(gamma, TopicDistribution([0.5, 0.3, 0.2]))
        assert sum(profile.weights) == pytest.approx(1.0)
        assert profile.weights[1] == pytest.approx(0.7)
        assert profile.top_themes == ["Natural Disasters & Weather", "Sports & Entertainment"]

    def test_theme_profile_matches_matrix_oracle(self):
        rng = random.Random(13)
        for _ in range(200):
            k = rng.randint(1, 12)
            live_themes = rng.sample(range(len(THEME_NAMES)), rng.randint(1, len(THEME_NAMES)))
            columns = []
            for _ in range(k):
                raw = [rng.random() if t in live_themes else 0.0 for t in range(len(THEME_NAMES))]
                columns.append([v / sum(raw) for v in raw])
            matrix = [[columns[j][t] for j in range(k)] for t in range(len(THEME_NAMES))]
            draws = [rng.expovariate(1.0) for _ in range(k)]
            theta = [d / sum(draws) for d in draws]

            mixed = [sum(matrix[t][j] * theta[j] for j in range(k)) for t in range(len(THEME_NAMES))]
            expected = [m / sum(mixed) for m in mixed]
            profile = theme_profile(ThemeMembership(matrix), TopicDistribution(theta))

            assert profile.weights == pytest.approx(expected, abs=1e-9)
            assert sum(profile.weights) == pytest.approx(1.0, abs=1e-9)
            ranked = sorted((t for t in range(len(THEME_NAMES)) if expected[t] > 0), key=lambda t: (-expected[t], t))
            assert profile.top_themes == [THEME_NAMES[t] for t in ranked]

    def test_top_themes_skip_zero_weights(self):
        gamma = ThemeMembership.from_assignments([1, 1, 3, 5])
        profile = theme_profile(gamma, TopicDistribution([0.6, 0.4, 0.0, 0.0]))
        assert profile.top_themes == [THEME_NAMES[1]]
        assert profile.weights[3] == 0.0

    def test_theme_profile_shape_mismatch(self):
        with pytest.raises(ValueError):
            theme_profile(ThemeMembership.from_assignments([1, 3]), TopicDistribution([0.2, 0.3, 0.5]))


# ── Retrieval ─────────────────────────────────────────────────────────────────

class TestRetrieval:
    def test_examples(self):
        posts = make_posts(["storm storm tonight", "nice coffee", "the storm", "flood warning storm"])
        ranked = [p.post_id for p in retrieve_relevant(posts, ["storm", "flood"], k=5)]
        assert ranked[0] == "u1-03"
        assert "u1-01" not in ranked
        assert ranked.index("u1-00") < ranked.index("u1-02")

    def test_matches_tfidf_oracle(self):
        rng = random.Random(12)
        query = ["storm", "flood", "surge", "power"]
        for _ in range(100):
            texts = []
            for _ in range(rng.randint(1, 12)):
                words = [rng.choice(FILLER) for _ in range(rng.randint(1, 5))]
                words += [rng.choice(query)] * rng.randint(0, 3)
                rng.shuffle(words)
                texts.append(" ".join(words))
            posts = make_posts(texts, step=60)
            got = [p.post_id for p in retrieve_relevant(posts, query, k=5)]
            assert got == oracle_retrieval(posts, query, 5)

    def test_empty_inputs(self):
        assert retrieve_relevant([], ["storm"]) == []
        with pytest.raises(ValueError):
            retrieve_relevant(make_posts(["storm"]), [" "])


# ── Personality, sentiment and tone ───────────────────────────────────────────

class FailingHttpSession:
    def post(self, *args, **kwargs):
        raise requests.ConnectionError("service down")


class TestPersonality:
    LEXICON = {"scared": {"neuroticism": 1.0}, "calm": {"neuroticism": -1.0}, "party": {"extraversion": 0.6}}

    def test_lexicon_scores(self):
        vector = LexiconPersonalityScorer(self.LEXICON).score("u1", ["Scared scared calm", "party time"])
        assert vector.neuroticism == pytest.approx(0.5 + 0.5 / 3)
        assert vector.extraversion == pytest.approx(0.8)
        assert vector.openness == 0.5

    def test_bundled_lexicon_loads(self):
        assert load_trait_lexicon()["scared"]["neuroticism"] == 1.0

    def test_no_posts_is_unavailable(self):
        with pytest.raises(FeatureUnavailable):
            score_personality("u1", [], LexiconPersonalityScorer(self.LEXICON))

    def test_external_failure_is_unavailable(self):
        scorer = ExternalPersonalityScorer("https://traits.example", http_session=FailingHttpSession())
        with pytest.raises(FeatureUnavailable) as info:
            score_personality("u1", make_posts(["hello there"]), scorer)
        assert info.value.extractor == "external-personality"

    def test_parse_trait_lines(self):
        vector = parse_trait_lines("Openness: 0.7\n- Conscientiousness = 0.6\nExtraversion: 0.4\n"
                                   "**Agreeableness**: 0.5\nNeuroticism: 1")
        assert vector.as_tuple() == (0.7, 0.6, 0.4, 0.5, 1.0)
        with pytest.raises(RetryableParseError):
            parse_trait_lines("Openness: 0.7")

    def test_llm_scorer_retries_once(self):
        good = "Openness: 0.7\nConscientiousness: 0.6\nExtraversion: 0.4\nAgreeableness: 0.5\nNeuroticism: 0.8"
        provider = MockProvider({"sessions": {"u1/personality": [{"reply": "I think they are nice."},
                                                                 {"reply": good}]}})
        scorer = LlmPersonalityScorer(provider, "Posts:\n{posts}", "retry", PARAMS)
        assert scorer.score("u1", ["a", "b"]).neuroticism == 0.8
        assert "- a\n- b" in provider.calls_for("u1/personality")[0]["body"]["messages"][0]["content"]

    def test_consistency_check(self):
        scorer = LexiconPersonalityScorer(self.LEXICON)
        steady = make_posts(["scared party"] * 4)
        consistent, deltas = check_personality_consistency("u1", steady, scorer)
        assert consistent
        assert max(deltas.values()) == 0.0
        swinging = make_posts(["scared", "calm", "scared", "calm"])
        consistent, deltas = check_personality_consistency("u1", swinging, scorer, float_range=0.15)
        assert not consistent
        assert deltas["neuroticism"] == pytest.approx(1.0)
        with pytest.raises(InsufficientData):
            check_personality_consistency("u1", steady[:1], scorer)


class TestSentiment:
    def test_lexicon_classifier(self):
        classifier = LexiconSentimentClassifier({"good": 1.0, "bad": -1.0})
        assert classifier.classify("Good day") == POSITIVE
        assert classifier.classify("bad bad good") == NEGATIVE
        assert classifier.classify("good bad") == NEUTRAL
        assert classifier.classify("") == NEUTRAL

    def test_trend_proportions_and_days(self):
        classifier = LexiconSentimentClassifier({"good": 1.0, "bad": -1.0})
        posts = [RawPost("a", "u1", START, "good"), RawPost("b", "u1", START + 60, "bad"),
                 RawPost("c", "u1", START + 2 * DAY, "meh"), RawPost("d", "u1", START + 2 * DAY + 5, "good")]
        trend = sentiment_trend("u1", posts, classifier)
        assert (trend.positive, trend.neutral, trend.negative) == (0.5, 0.25, 0.25)
        first_day = START // DAY
        assert [d.day_index for d in trend.daily_series] == [0, (START + 2 * DAY) // DAY - first_day]
        assert trend.post_count == 4

    def test_bundled_lexicon(self):
        assert load_sentiment_lexicon()["good"] > 0

    def test_llm_classifier(self):
        text = "Storm tonight"
        tag = "sentiment/" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
        provider = MockProvider({"sessions": {tag: [{"reply": "Negative. The author is worried."}]}})
        classifier = LlmSentimentClassifier(provider, "Classify: {text}", PARAMS)
        assert classifier.classify(text) == NEGATIVE

    def test_provider_failure_is_unavailable(self):
        classifier = LlmSentimentClassifier(MockProvider(), "Classify: {text}", PARAMS)
        with pytest.raises(FeatureUnavailable):
            sentiment_trend("u1", make_posts(["unscripted"]), classifier)


class TestTone:
    def test_parse(self):
        assert parse_tone("anxious, urgent, emotional\nextra").words == ("anxious", "urgent", "emotional")
        assert parse_tone('"Direct, casual, warm."').words == ("Direct", "casual", "warm")
        with pytest.raises(RetryableParseError):
            parse_tone("direct and casual")
        with pytest.raises(RetryableParseError):
            parse_tone("very direct, casual, warm")

    def test_extract_with_retry(self):
        provider = MockProvider({"sessions": {"u1/tone": [{"reply": "They sound calm."},
                                                          {"reply": "calm, factual, friendly"}]}})
        tone = extract_tone("u1", make_posts(["hello"]), provider, "{tweets}", "retry", PARAMS)
        assert tone.words == ("calm", "factual", "friendly")

    def test_refusal_is_unavailable(self):
        provider = MockProvider({"sessions": {"u1/tone": [{"refusal": "blocked"}]}})
        with pytest.raises(ToneUnavailable):
            extract_tone("u1", make_posts(["hello"]), provider, "{tweets}", "retry", PARAMS)


# ── Risk communication features and profile assembly ──────────────────────────

class TestGeography:
    def test_haversine(self):
        assert float(haversine_km(40.7128, -74.0060, 51.5074, -0.1278)) == pytest.approx(5570, rel=0.01)
        assert float(haversine_km(10.0, 20.0, 10.0, 20.0)) == pytest.approx(0.0, abs=1e-9)
        assert float(haversine_km(0.0, 0.0, 1.0, 0.0)) == pytest.approx(111.195, rel=1e-3)

    def test_distance_is_minimum_over_track(self):
        assert distance_to_track(39.4, -74.4, track_context()) == pytest.approx(0.0, abs=1e-6)
        assert distance_to_track(39.4, -74.4, DisasterContext("Hurricane Sandy", [])) is None

    def test_posts_per_day(self):
        posts = make_posts(["a"] * 12)
        assert posts_per_day(posts) == pytest.approx(12 / 11)
        assert posts_per_day(make_posts(["a"] * 3, step=60)) == 3.0
        assert posts_per_day(posts, observation_days=30) == pytest.approx(0.4)
        assert posts_per_day([]) == 0.0

    def test_posts_per_day_window(self):
        posts = make_posts(["a"] * 20, step=DAY // 2)
        assert posts_per_day(posts, observation_days=10) == 2.0
        # No window: the user's own span, 9.5 days here.
        assert posts_per_day(posts) == pytest.approx(20 / 9.5)


class TestBuildProfile:
    def scorers(self, **kwargs):
        return ProfileScorers(LexiconPersonalityScorer(load_trait_lexicon()),
                              LexiconSentimentClassifier(load_sentiment_lexicon()), **kwargs)

    def test_lexicon_profile_without_optional_extractors(self):
        timeline = UserTimeline("u1", make_posts(["the storm is coming, so scared", "good game tonight"]))
        profile = build_profile(timeline, track_context(), self.scorers())
        assert profile.personality is not None
        assert profile.sentiment_trend is not None
        assert profile.theme_profile is None
        assert profile.flags == sorted([FLAG_TONE, FLAG_LOCATION])
        assert profile.relevant_posts == ["the storm is coming, so scared"]

    def test_geotagged_user_gets_distance(self):
        timeline = UserTimeline("u1", make_posts(["storm here"], latitude=39.4, longitude=-74.4))
        profile = build_profile(timeline, track_context(), self.scorers(tone=lambda user, posts: None))
        assert profile.risk_comm.distance_to_track_km == pytest.approx(0.0, abs=1e-6)
        assert FLAG_LOCATION not in profile.flags

    def test_failed_extractors_are_flagged(self, two_topic_model):
        model, _ = two_topic_model

        def failing_tone(user_id, posts):
            raise ToneUnavailable("no tone")

        gamma = ThemeMembership.from_assignments([1, 3])
        scorers = self.scorers(topic_model=model, theme_membership=gamma, tone=failing_tone)
        profile = build_profile(UserTimeline("u1", post_posts=make_posts(["after"], step=1)), None, scorers)
        assert set(profile.flags) == {FLAG_PERSONALITY, FLAG_SENTIMENT, FLAG_TONE, FLAG_TOPICS_OOV, FLAG_LOCATION}
        assert profile.topic_distribution.out_of_vocabulary
        assert profile.theme_profile.weights[1] == pytest.approx(0.5)

    def test_topic_inference_is_seeded_per_user(self, two_topic_model):
        model, _ = two_topic_model
        scorers = self.scorers(topic_model=model, seed=4)
        timeline = UserTimeline("u1", make_posts(["storm wind", "giants game", "rain flood"]))
        first = build_profile(timeline, None, scorers)
        second = build_profile(timeline, None, scorers)
        assert first.to_dict() == second.to_dict()
