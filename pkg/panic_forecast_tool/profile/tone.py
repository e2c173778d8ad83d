# panic_forecast_tool/profile/tone.py
# All comments and identifiers in English

import json
import logging
from typing import List

from ..agent.prompts import render
from ..data_models.corpus_types import RawPost
from ..data_models.gateway_types import GenerationParams
from ..data_models.profile_types import ToneTriple
from ..errors import RetryableParseError, ToneUnavailable, GatewayError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession

logger = logging.getLogger(__name__)


def parse_tone(text: str) -> ToneTriple:
    lines = [line.strip() for line in (text or "").splitlines() if line.strip()]
    if not lines:
        raise RetryableParseError("Empty tone reply")
    words = [w.strip().strip('."\'*') for w in lines[0].split(",")]
    if len(words) != 3 or any(not w or " " in w for w in words):
        raise RetryableParseError(f"Tone reply is not three comma-separated words: {lines[0]!r}")
    return ToneTriple(*words)


def extract_tone(user_id: str, pre_posts: List[RawPost], provider: ChatProvider, template: str,
                 retry_template: str, params: GenerationParams) -> ToneTriple:
    session = AgentSession(f"{user_id}/tone", provider)
    tweets = json.dumps([p.text for p in pre_posts], ensure_ascii=False)
    try:
        reply = session.complete(render("tone", template, {"tweets": tweets}), params)
        try:
            return parse_tone(reply)
        except RetryableParseError:
            return parse_tone(session.complete(retry_template, params))
    except (RetryableParseError, GatewayError) as e:
        logger.warning("Tone unavailable for user '%s': %s", user_id, e)
        raise ToneUnavailable(f"Tone unavailable for user '{user_id}': {e}") from e
