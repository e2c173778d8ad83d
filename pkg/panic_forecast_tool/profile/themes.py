# panic_forecast_tool/profile/themes.py
# All comments and identifiers in English

import logging
import re
from typing import List, Dict, Any

import numpy as np

from ..agent.prompts import render
from ..data_models.common_types import THEME_NAMES, MISCELLANEOUS_THEME_INDEX, ThemeMode
from ..data_models.gateway_types import GenerationParams
from ..data_models.profile_types import ThemeMembership, ThemeProfile, TopicDistribution
from ..errors import RetryableParseError, GatewayError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession

logger = logging.getLogger(__name__)

THEMES_SESSION_TAG = "themes"
ASSIGNMENT_LINE_RE = re.compile(r"topic\s*#?\s*(\d+)\s*[:\-=]\s*(.+)", re.IGNORECASE)


def _normalize_theme(name: str) -> str:
    name = name.lower().replace("\\&", "&").replace(" and ", " & ")
    return re.sub(r"[^a-z&]+", " ", name).strip()


_THEME_LOOKUP = {_normalize_theme(name): index for index, name in enumerate(THEME_NAMES)}


def static_assignments(topic_keywords: List[List[str]], theme_config: Dict[str, Any]) -> List[int]:
    """
    Explicit `assignments` ({topic index: theme name}) win. Other topics go to
    the theme sharing the most keywords, ties to the lower theme index, no
    overlap to Miscellaneous.
    """
    seeds = {}
    for entry in theme_config.get("themes", []):
        key = _normalize_theme(entry["name"])
        if key not in _THEME_LOOKUP:
            raise ValueError(f"Theme config names unknown theme '{entry['name']}'.")
        seeds[_THEME_LOOKUP[key]] = {w.lower() for w in entry.get("keywords", [])}
    explicit = {}
    for topic, theme in theme_config.get("assignments", {}).items():
        key = _normalize_theme(theme)
        if key not in _THEME_LOOKUP:
            raise ValueError(f"Theme config assigns topic {topic} to unknown theme '{theme}'.")
        explicit[int(topic)] = _THEME_LOOKUP[key]

    result = []
    for topic, keywords in enumerate(topic_keywords):
        if topic in explicit:
            result.append(explicit[topic])
            continue
        words = {w.lower() for w in keywords}
        best, best_overlap = MISCELLANEOUS_THEME_INDEX, 0
        for theme in range(len(THEME_NAMES)):
            overlap = len(words & seeds.get(theme, set()))
            if overlap > best_overlap:
                best, best_overlap = theme, overlap
        result.append(best)
    return result


def parse_theme_assignments(text: str, topic_count: int) -> List[int]:
    found: Dict[int, int] = {}
    for line in (text or "").splitlines():
        match = ASSIGNMENT_LINE_RE.search(line.replace("*", ""))
        if not match:
            continue
        topic = int(match.group(1)) - 1
        theme = _THEME_LOOKUP.get(_normalize_theme(match.group(2)))
        if theme is None:
            raise RetryableParseError(f"Unknown theme '{match.group(2).strip()}' for topic {topic + 1}")
        if 0 <= topic < topic_count and topic not in found:
            found[topic] = theme
    missing = [t + 1 for t in range(topic_count) if t not in found]
    if missing:
        raise RetryableParseError(f"Theme assignment reply misses topics {missing}")
    return [found[t] for t in range(topic_count)]


def render_topic_keywords(topic_keywords: List[List[str]]) -> str:
    return "\n".join(f"Topic {i + 1}: {', '.join(words)}" for i, words in enumerate(topic_keywords))


def consolidate_themes(topic_keywords: List[List[str]],
                       mode: ThemeMode,
                       theme_config: Dict[str, Any],
                       provider: ChatProvider = None,
                       template: str = "",
                       retry_template: str = "",
                       params: GenerationParams = None) -> ThemeMembership:
    if mode == ThemeMode.STATIC_CONFIG:
        return ThemeMembership.from_assignments(static_assignments(topic_keywords, theme_config))
    if provider is None:
        raise ValueError("LLM theme consolidation needs a provider.")

    session = AgentSession(THEMES_SESSION_TAG, provider)
    prompt = render("theme_consolidation", template, {"topic_keywords": render_topic_keywords(topic_keywords),
                                                      "theme_names": "\n".join(THEME_NAMES)})
    try:
        reply = session.complete(prompt, params)
        try:
            assignments = parse_theme_assignments(reply, len(topic_keywords))
        except RetryableParseError as e:
            logger.warning("Re-prompting theme consolidation: %s", e)
            assignments = parse_theme_assignments(session.complete(retry_template, params), len(topic_keywords))
    except (RetryableParseError, GatewayError) as e:
        logger.warning("LLM theme consolidation failed (%s); using the static mapping", e)
        assignments = static_assignments(topic_keywords, theme_config)
    return ThemeMembership.from_assignments(assignments)


def theme_profile(gamma: ThemeMembership, theta: TopicDistribution) -> ThemeProfile:
    """
    tau = Gamma . Theta renormalized to sum to 1. `top_themes` holds only
    the themes with non-zero weight, heaviest first and ties in theme order,
    so it can be shorter than the number of themes a prompt asks for; it is
    never padded with zero-weight themes.
    """
    weights = theta.as_array()
    if gamma.topic_count != weights.shape[0]:
        raise ValueError(f"Theme matrix has {gamma.topic_count} topic columns but Theta has {weights.shape[0]} "
                         f"components.")
    tau = gamma.matrix @ weights
    tau = np.clip(tau, 0.0, None)
    tau = tau / tau.sum()
    order = sorted((i for i in range(len(tau)) if tau[i] > 0), key=lambda i: (-tau[i], i))
    return ThemeProfile(tau.tolist(), [gamma.theme_names[i] for i in order])

