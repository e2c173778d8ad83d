# panic_forecast_tool/annotator/llm_labels.py
# All comments and identifiers in English

import logging

from ..agent.prompts import render
from ..data_models.annotation_types import LlmLabel
from ..data_models.gateway_types import GenerationParams
from ..discriminator.classifiers import parse_yes_no
from ..errors import GatewayError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession

logger = logging.getLogger(__name__)


def _ask(session_tag: str, prompt: str, provider: ChatProvider, retry_template: str,
         params: GenerationParams) -> LlmLabel:
    session = AgentSession(session_tag, provider)
    try:
        reply = session.complete(prompt, params)
        parsed = parse_yes_no(reply)
        if parsed is None:
            reply = session.complete(retry_template, params)
            parsed = parse_yes_no(reply)
    except GatewayError as e:
        logger.warning("Labeling session '%s' failed: %s", session_tag, e)
        return LlmLabel(None, str(e))
    if parsed is None:
        logger.info("Labeling session '%s' left unlabeled: %r", session_tag, reply[:80])
        return LlmLabel(None, reply.strip())
    return LlmLabel(parsed[0], parsed[1])


def llm_label_relevance(post_id: str, text: str, event_name: str, provider: ChatProvider, template: str,
                        retry_template: str, params: GenerationParams) -> LlmLabel:
    prompt = render("relevance_label", template, {"event_name": event_name, "text": text})
    return _ask(f"annotate/{post_id}/relevance", prompt, provider, retry_template, params)


def llm_label_panic(post_id: str, text: str, provider: ChatProvider, template: str, retry_template: str,
                    params: GenerationParams) -> LlmLabel:
    if not text.strip():
        return LlmLabel(None, "")
    return _ask(f"annotate/{post_id}/panic", render("panic_label", template, {"text": text}), provider,
                retry_template, params)
