# panic_forecast_tool/errors.py
# All comments and identifiers in English

from typing import Iterable, Optional


class PanicForecastError(Exception):
    """Root of every error raised by the package."""


class ConfigurationError(PanicForecastError):
    """The run configuration or the environment is not usable."""


class TemplateError(PanicForecastError):
    """A prompt template references a placeholder that was not supplied."""

    def __init__(self, template_name: str, missing: Iterable[str]):
        self.template_name = template_name
        self.missing = sorted(set(missing))
        super().__init__(f"Template '{template_name}' has unresolved placeholders: {', '.join(self.missing)}")


class FeatureUnavailable(PanicForecastError):
    def __init__(self, user_id: str, extractor: str, detail: str = ""):
        self.user_id = user_id
        self.extractor = extractor
        message = f"Feature extractor '{extractor}' failed for user '{user_id}'"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class InsufficientData(PanicForecastError):
    pass


class ToneUnavailable(PanicForecastError):
    pass


class RetryableParseError(PanicForecastError):
    """The reply could not be parsed; the caller may re-prompt once."""


class ClassificationUnavailable(PanicForecastError):
    pass


class RecordNotFound(PanicForecastError):
    pass


# --- Gateway errors ---

class GatewayError(PanicForecastError):
    pass


class TransportError(GatewayError):
    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{message} (after {attempts} attempt(s))")


class ProviderRefusal(GatewayError):
    def __init__(self, session_tag: str, reason: str = ""):
        self.session_tag = session_tag
        self.reason = reason
        super().__init__(f"Provider refused the request for session '{session_tag}': {reason or 'no reason given'}")


class ProtocolError(GatewayError):
    pass


class UnscriptedTurnError(GatewayError):
    def __init__(self, session_tag: str, turn_index: int):
        self.session_tag = session_tag
        self.turn_index = turn_index
        super().__init__(f"Mock script has no entry for session '{session_tag}', turn {turn_index}")


class DeadSessionError(GatewayError):
    pass


# --- Agent parse errors ---

class AgentParseError(PanicForecastError):
    def __init__(self, message: str, raw_text: Optional[str] = None):
        self.raw_text = raw_text
        super().__init__(message)


class ArousalParseError(AgentParseError):
    pass


class GenerationParseError(AgentParseError):
    pass


class VerdictParseError(AgentParseError):
    pass


class MalformedCorpusError(PanicForecastError):
    """Too large a share of the input rows could not be parsed."""

    def __init__(self, malformed: int, total: int, limit: float):
        self.malformed = malformed
        self.total = total
        self.limit = limit
        super().__init__(f"{malformed} of {total} corpus rows are malformed (limit {limit:.0%}); aborting ingest.")
