# panic_forecast_tool/llm_gateway/providers.py
# All comments and identifiers in English

import logging
import os
import threading
import time
from typing import Dict, Any, List, Optional

import requests
from tenacity import Retrying, RetryError, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..data_models.gateway_types import ChatMessage, GenerationParams, ProviderConfig
from ..errors import (ConfigurationError, GatewayError, ProtocolError, ProviderRefusal, TransportError,
                      UnscriptedTurnError)
from ..project_io.json_handler import load_json_document, read_jsonl
from .transcript import TranscriptLog, TranscriptRecord, request_hash

logger = logging.getLogger(__name__)


def build_request_body(messages: List[ChatMessage], params: GenerationParams,
                       native_repetition_penalty: bool = False) -> Dict[str, Any]:
    """OpenAI-compatible chat-completions request body."""
    body: Dict[str, Any] = {
        "model": params.model_id,
        "messages": [m.to_dict() for m in messages],
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
    }
    if params.repetition_penalty is not None:
        field = "repetition_penalty" if native_repetition_penalty else "frequency_penalty"
        body[field] = params.repetition_penalty
    return body


class CompletionResult:
    def __init__(self, text: str, latency_ms: int = 0, usage: Optional[Dict[str, int]] = None):
        self.text: str = text
        self.latency_ms: int = latency_ms
        self.usage: Dict[str, int] = usage or {}


class ChatProvider:
    """
    Base provider. Enforces the in-flight bound, writes transcript records
    and leaves the actual exchange to `_send`. Safe to share across threads.
    """

    native_repetition_penalty = False

    def __init__(self, max_in_flight: int = 4, transcript: Optional[TranscriptLog] = None):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1.")
        self.max_in_flight: int = max_in_flight
        self.transcript: Optional[TranscriptLog] = transcript
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._counter_lock = threading.Lock()
        self._in_flight = 0
        self.max_observed_in_flight = 0

    def chat(self, session_tag: str, turn_index: int, messages: List[ChatMessage],
             params: GenerationParams) -> CompletionResult:
        body = build_request_body(messages, params, self.native_repetition_penalty)
        digest = request_hash(body)
        params_record = params.to_dict()
        with self._slots:
            with self._counter_lock:
                self._in_flight += 1
                self.max_observed_in_flight = max(self.max_observed_in_flight, self._in_flight)
            try:
                result = self._send(session_tag, turn_index, messages, params, body)
            except ProviderRefusal as refusal:
                self._record(TranscriptRecord(session_tag, turn_index, digest, params_record, None,
                                              refusal.reason or "refused"))
                raise
            except GatewayError as e:
                self._record(TranscriptRecord(session_tag, turn_index, digest, params_record, None,
                                              error=f"{type(e).__name__}: {e}"))
                raise
            finally:
                with self._counter_lock:
                    self._in_flight -= 1
        self._record(TranscriptRecord(session_tag, turn_index, digest, params_record, result.text,
                                      None, result.latency_ms, result.usage))
        return result

    def _record(self, record: TranscriptRecord) -> None:
        if self.transcript is not None:
            self.transcript.append(record)

    def _send(self, session_tag: str, turn_index: int, messages: List[ChatMessage],
              params: GenerationParams, body: Dict[str, Any]) -> CompletionResult:
        raise NotImplementedError


class MockProvider(ChatProvider):
    """
    Offline provider replaying a script keyed by (session tag, turn index).
    An entry holds a `reply`, a `refusal` or an `error`; the last one fails
    the turn with a TransportError. Every request is kept in `requests`
    for assertions.
    """

    def __init__(self, script: Optional[Dict[str, Any]] = None, max_in_flight: int = 4,
                 transcript: Optional[TranscriptLog] = None):
        super().__init__(max_in_flight, transcript)
        script = script or {}
        self.latency_ms: int = int(script.get("latencyMs", 0))
        self.sessions: Dict[str, List[Dict[str, Any]]] = {tag: list(entries) for tag, entries in
                                                          script.get("sessions", {}).items()}
        self.requests: List[Dict[str, Any]] = []
        self._requests_lock = threading.Lock()

    @classmethod
    def from_file(cls, filepath: str, **kwargs) -> 'MockProvider':
        return cls(load_json_document(filepath), **kwargs)

    @classmethod
    def from_transcript(cls, filepath: str, **kwargs) -> 'MockProvider':
        """Turns a transcript log into a script that reproduces it."""
        sessions: Dict[str, Dict[int, Dict[str, Any]]] = {}
        for data in read_jsonl(filepath):
            record = TranscriptRecord.from_dict(data)
            if record.error is not None:
                entry = {"error": record.error}
            elif record.refusal is not None:
                entry = {"refusal": record.refusal}
            else:
                entry = {"reply": record.reply}
            entry["latencyMs"] = record.latency_ms
            sessions.setdefault(record.session_tag, {})[record.turn_index] = entry
        script = {"latencyMs": 0, "sessions": {}}
        for tag, turns in sessions.items():
            if sorted(turns) != list(range(len(turns))):
                raise ValueError(f"Transcript session '{tag}' has gaps in its turn indices.")
            script["sessions"][tag] = [turns[i] for i in range(len(turns))]
        return cls(script, **kwargs)

    def calls_for(self, session_tag: str) -> List[Dict[str, Any]]:
        with self._requests_lock:
            return [r for r in self.requests if r["sessionTag"] == session_tag]

    def _send(self, session_tag, turn_index, messages, params, body) -> CompletionResult:
        with self._requests_lock:
            self.requests.append({"sessionTag": session_tag, "turnIndex": turn_index, "body": body})
        entries = self.sessions.get(session_tag, [])
        if turn_index >= len(entries):
            raise UnscriptedTurnError(session_tag, turn_index)
        entry = entries[turn_index]
        latency = int(entry.get("latencyMs", self.latency_ms))
        if latency > 0:
            time.sleep(latency / 1000.0)
        if "refusal" in entry:
            raise ProviderRefusal(session_tag, entry["refusal"])
        if "error" in entry:
            raise TransportError(entry["error"], 1)
        reply = entry.get("reply")
        if reply is None:
            raise ProtocolError(f"Mock entry for '{session_tag}' turn {turn_index} has neither reply nor refusal")
        usage = {
            "promptTokens": sum(len(m.content.split()) for m in messages),
            "completionTokens": len(reply.split()),
        }
        return CompletionResult(reply, latency, usage)


class _RetryableHttpError(Exception):
    pass


# Connection-level failures, including a body cut off mid-stream.
RETRYABLE_REQUEST_ERRORS = (requests.Timeout, requests.ConnectionError, requests.exceptions.ChunkedEncodingError,
                            requests.exceptions.ContentDecodingError)


class HttpProvider(ChatProvider):
    """
    Client for an OpenAI-compatible chat-completions endpoint. The token is
    read from the environment variable named in the config.
    """

    def __init__(self, config: ProviderConfig, transcript: Optional[TranscriptLog] = None,
                 http_session: Optional[requests.Session] = None):
        super().__init__(config.max_in_flight, transcript)
        if not config.endpoint_url:
            raise ConfigurationError("provider.endpointUrl is not set.")
        token = os.environ.get(config.token_env_var)
        if not token:
            raise ConfigurationError(f"Environment variable '{config.token_env_var}' with the provider token is not set.")
        self.config: ProviderConfig = config
        self.native_repetition_penalty = config.native_repetition_penalty
        self._http = http_session or requests.Session()
        self._headers = {"Authorization": f"Bearer {token}", "Content-Type": "application/json"}

    def _send(self, session_tag, turn_index, messages, params, body) -> CompletionResult:
        if not body.get("model"):
            body = dict(body, model=self.config.model_id)
        policy = self.config.retry
        retrying = Retrying(
            retry=retry_if_exception_type(_RetryableHttpError),
            stop=stop_after_attempt(policy.count + 1),
            wait=wait_exponential(multiplier=policy.backoff_seconds, max=policy.max_backoff_seconds),
            before_sleep=lambda state: logger.warning(
                "Retrying '%s' turn %d (attempt %d) after: %s", session_tag, turn_index,
                state.attempt_number, state.outcome.exception()),
        )
        try:
            return retrying(self._post_once, session_tag, body)
        except RetryError as e:
            attempts = e.last_attempt.attempt_number
            raise TransportError(f"Request for '{session_tag}' turn {turn_index} failed: "
                                 f"{e.last_attempt.exception()}", attempts) from e

    def _post_once(self, session_tag: str, body: Dict[str, Any]) -> CompletionResult:
        started = time.monotonic()
        try:
            response = self._http.post(self.config.endpoint_url, json=body, headers=self._headers,
                                       timeout=self.config.timeout_seconds)
        except RETRYABLE_REQUEST_ERRORS as e:
            raise _RetryableHttpError(str(e)) from e
        except requests.RequestException as e:
            raise TransportError(f"Request for '{session_tag}' failed: {e}", 1) from e
        latency_ms = int((time.monotonic() - started) * 1000)

        if response.status_code == 429 or response.status_code >= 500:
            raise _RetryableHttpError(f"HTTP {response.status_code}")
        payload = self._json(response)
        if 400 <= response.status_code < 500:
            error = payload.get("error") if isinstance(payload, dict) else None
            code = str((error or {}).get("code", "")) if isinstance(error, dict) else ""
            if "content" in code:
                raise ProviderRefusal(session_tag, (error or {}).get("message", code))
            raise ProtocolError(f"HTTP {response.status_code}: {response.text[:200]}")
        return self._parse_completion(session_tag, payload, latency_ms)

    @staticmethod
    def _json(response: requests.Response) -> Any:
        try:
            return response.json()
        except ValueError:
            if response.status_code >= 400:
                return {}
            raise ProtocolError(f"Provider returned a non-JSON body: {response.text[:200]}")

    @staticmethod
    def _parse_completion(session_tag: str, payload: Any, latency_ms: int) -> CompletionResult:
        try:
            choice = payload["choices"][0]
            message = choice["message"]
        except (KeyError, IndexError, TypeError):
            raise ProtocolError(f"Provider payload lacks choices[0].message: {str(payload)[:200]}")
        if choice.get("finish_reason") == "content_filter" or message.get("refusal"):
            raise ProviderRefusal(session_tag, message.get("refusal") or "content_filter")
        content = message.get("content")
        if not isinstance(content, str) or not content:
            raise ProtocolError("Provider payload has no message content.")
        usage_raw = payload.get("usage") or {}
        usage = {
            "promptTokens": int(usage_raw.get("prompt_tokens", 0)),
            "completionTokens": int(usage_raw.get("completion_tokens", 0)),
        }
        return CompletionResult(content, latency_ms, usage)


def create_provider(config: ProviderConfig, mock_script_path: str = "",
                    transcript: Optional[TranscriptLog] = None) -> ChatProvider:
    if mock_script_path:
        logger.info("Using scripted mock provider from %s", mock_script_path)
        return MockProvider.from_file(mock_script_path, max_in_flight=config.max_in_flight, transcript=transcript)
    return HttpProvider(config, transcript=transcript)
