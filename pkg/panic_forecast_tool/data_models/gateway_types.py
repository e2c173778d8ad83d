# panic_forecast_tool/data_models/gateway_types.py
# All comments and identifiers in English

from typing import Dict, Any, Optional

from .common_types import ChatRole


class ChatMessage:
    def __init__(self, role: ChatRole, content: str):
        if not isinstance(role, ChatRole):
            raise ValueError("role must be an instance of ChatRole enum.")
        if role in (ChatRole.USER, ChatRole.SYSTEM) and not content:
            raise ValueError(f"content cannot be empty for role '{role.value}'.")
        self.role: ChatRole = role
        self.content: str = content if content is not None else ""

    @classmethod
    def user(cls, content: str) -> 'ChatMessage':
        return cls(ChatRole.USER, content)

    @classmethod
    def system(cls, content: str) -> 'ChatMessage':
        return cls(ChatRole.SYSTEM, content)

    @classmethod
    def assistant(cls, content: str) -> 'ChatMessage':
        return cls(ChatRole.ASSISTANT, content)

    def __eq__(self, other) -> bool:
        return isinstance(other, ChatMessage) and self.role == other.role and self.content == other.content

    def __repr__(self) -> str:
        return f"ChatMessage({self.role.value}, {self.content[:40]!r})"

    def to_dict(self) -> Dict[str, Any]:
        return {"role": self.role.value, "content": self.content}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ChatMessage':
        return cls(ChatRole.from_string(data["role"]), data.get("content", ""))


class GenerationParams:
    """Sampling controls sent with one completion request."""
    def __init__(self,
                 temperature: float = 0.4,
                 max_tokens: int = 1024,
                 model_id: str = "",
                 repetition_penalty: Optional[float] = None):
        if not 0.0 <= temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {temperature}.")
        if max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {max_tokens}.")
        self.temperature: float = float(temperature)
        self.max_tokens: int = int(max_tokens)
        self.model_id: str = model_id
        self.repetition_penalty: Optional[float] = repetition_penalty

    def with_model(self, model_id: str) -> 'GenerationParams':
        return GenerationParams(self.temperature, self.max_tokens, model_id, self.repetition_penalty)

    def to_dict(self) -> Dict[str, Any]:
        data = {"temperature": self.temperature, "maxTokens": self.max_tokens, "modelId": self.model_id}
        if self.repetition_penalty is not None:
            data["repetitionPenalty"] = self.repetition_penalty
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GenerationParams':
        return cls(
            temperature=float(data.get("temperature", 0.4)),
            max_tokens=int(data.get("maxTokens", 1024)),
            model_id=data.get("modelId", ""),
            repetition_penalty=data.get("repetitionPenalty"),
        )


class RetryPolicy:
    def __init__(self, count: int = 3, backoff_seconds: float = 1.0, max_backoff_seconds: float = 30.0):
        if count < 1:
            raise ValueError("retry count must be >= 1.")
        self.count: int = int(count)
        self.backoff_seconds: float = float(backoff_seconds)
        self.max_backoff_seconds: float = float(max_backoff_seconds)

    def to_dict(self) -> Dict[str, Any]:
        return {"count": self.count, "backoffSeconds": self.backoff_seconds,
                "maxBackoffSeconds": self.max_backoff_seconds}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RetryPolicy':
        return cls(int(data.get("count", 3)), float(data.get("backoffSeconds", 1.0)),
                   float(data.get("maxBackoffSeconds", 30.0)))


class ProviderConfig:
    """
    Connection settings for an OpenAI-compatible chat-completions endpoint.
    The token itself never lives in the config, only the variable name.
    """
    def __init__(self,
                 endpoint_url: str = "",
                 token_env_var: str = "PANIC_FORECAST_API_TOKEN",
                 model_id: str = "",
                 timeout_seconds: float = 60.0,
                 max_in_flight: int = 4,
                 retry: Optional[RetryPolicy] = None,
                 native_repetition_penalty: bool = False):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1.")
        if timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive.")
        self.endpoint_url: str = endpoint_url
        self.token_env_var: str = token_env_var
        self.model_id: str = model_id
        self.timeout_seconds: float = float(timeout_seconds)
        self.max_in_flight: int = int(max_in_flight)
        self.retry: RetryPolicy = retry if retry is not None else RetryPolicy()
        # When False, repetition_penalty is sent as frequency_penalty.
        self.native_repetition_penalty: bool = native_repetition_penalty

    def to_dict(self) -> Dict[str, Any]:
        return {
            "endpointUrl": self.endpoint_url,
            "tokenEnvVar": self.token_env_var,
            "modelId": self.model_id,
            "timeoutSeconds": self.timeout_seconds,
            "maxInFlight": self.max_in_flight,
            "retry": self.retry.to_dict(),
            "nativeRepetitionPenalty": self.native_repetition_penalty,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ProviderConfig':
        return cls(
            endpoint_url=data.get("endpointUrl", ""),
            token_env_var=data.get("tokenEnvVar", "PANIC_FORECAST_API_TOKEN"),
            model_id=data.get("modelId", ""),
            timeout_seconds=float(data.get("timeoutSeconds", 60.0)),
            max_in_flight=int(data.get("maxInFlight", 4)),
            retry=RetryPolicy.from_dict(data.get("retry", {})),
            native_repetition_penalty=bool(data.get("nativeRepetitionPenalty", False)),
        )
