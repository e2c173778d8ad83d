# panic_forecast_tool/llm_gateway/session.py
# All comments and identifiers in English

import logging
from typing import List, Optional, Union, Dict

from ..data_models.common_types import ChatRole
from ..data_models.gateway_types import ChatMessage, GenerationParams
from ..errors import DeadSessionError, ProviderRefusal
from .providers import ChatProvider

logger = logging.getLogger(__name__)


class AgentSession:
    """
    Conversation memory for one agent. History is append-only: the initial
    system block, then one user/assistant pair per completed turn.
    A refusal marks the session dead and every later call fails.
    """

    def __init__(self, session_tag: str, provider: ChatProvider,
                 system_messages: Optional[List[ChatMessage]] = None):
        if not session_tag:
            raise ValueError("session_tag cannot be empty.")
        for message in system_messages or []:
            if message.role != ChatRole.SYSTEM:
                raise ValueError("Only system messages may precede the first turn.")
        self.session_tag: str = session_tag
        self.provider: ChatProvider = provider
        self.history: List[ChatMessage] = list(system_messages or [])
        self.system_count: int = len(self.history)
        self.turn_index: int = 0
        self.usage: Dict[str, int] = {"promptTokens": 0, "completionTokens": 0}
        self.dead: bool = False
        self.dead_reason: str = ""

    @property
    def completed_turns(self) -> int:
        return (len(self.history) - self.system_count) // 2

    def complete(self, prompt: Union[ChatMessage, str], params: GenerationParams) -> str:
        if self.dead:
            raise DeadSessionError(f"Session '{self.session_tag}' is dead: {self.dead_reason}")
        if isinstance(prompt, str):
            prompt = ChatMessage.user(prompt)
        if prompt.role != ChatRole.USER:
            raise ValueError("complete() takes a user message.")

        try:
            result = self.provider.chat(self.session_tag, self.turn_index, self.history + [prompt], params)
        except ProviderRefusal as refusal:
            self.dead = True
            self.dead_reason = refusal.reason or "refused"
            self.turn_index += 1
            logger.warning("Session '%s' refused at turn %d: %s", self.session_tag, self.turn_index - 1,
                           self.dead_reason)
            raise

        self.history.append(prompt)
        self.history.append(ChatMessage.assistant(result.text))
        self.turn_index += 1
        for key in self.usage:
            self.usage[key] += int(result.usage.get(key, 0))
        return result.text
