# panic_forecast_tool/discriminator/classifiers.py
# All comments and identifiers in English

import hashlib
import logging
import re
from typing import Dict, Any, Optional, Tuple

import requests

from ..agent.prompts import render
from ..data_models.common_types import PanicClass
from ..data_models.eval_types import PanicLabel
from ..data_models.gateway_types import GenerationParams
from ..errors import ClassificationUnavailable, GatewayError
from ..llm_gateway.providers import ChatProvider
from ..llm_gateway.session import AgentSession

logger = logging.getLogger(__name__)

RULE_WORD_RE = re.compile(r"[A-Za-z][A-Za-z']*")
YES_NO_RE = re.compile(r"^\W*(yes|no)\b\W*(.*)", re.IGNORECASE | re.DOTALL)


def parse_yes_no(text: str) -> Optional[Tuple[bool, str]]:
    """Leading Yes/No token, case and punctuation tolerant; None when absent."""
    match = YES_NO_RE.match(text or "")
    if not match:
        return None
    return match.group(1).lower() == "yes", match.group(2).strip()


class PanicClassifier:
    name = "panic-classifier"

    def classify(self, text: str) -> PanicLabel:
        raise NotImplementedError


class RuleClassifier(PanicClassifier):
    """
    score = w_lex * (lexicon weight per word) + w_caps * (all-caps words per
    word) + w_punct * (repeated-punctuation runs per word), clamped to [0, 1].
    """
    name = "rule-lexicon"

    def __init__(self, lexicon: Dict[str, float], weights: Optional[Dict[str, float]] = None,
                 threshold: float = 0.3, min_caps_letters: int = 2, min_punctuation_run: int = 2):
        weights = weights or {}
        self.lexicon = {w.lower(): float(v) for w, v in lexicon.items()}
        self.lexicon_weight = float(weights.get("lexicon", 1.5))
        self.caps_weight = float(weights.get("caps", 0.5))
        self.punctuation_weight = float(weights.get("punctuation", 0.5))
        self.threshold = float(threshold)
        self.min_caps_letters = int(min_caps_letters)
        self.min_punctuation_run = int(min_punctuation_run)
        self._punctuation_re = re.compile(r"[!?.]{%d,}" % self.min_punctuation_run)

    @classmethod
    def from_rule(cls, lexicon: Dict[str, float], rule: Dict[str, Any]) -> 'RuleClassifier':
        return cls(lexicon, rule.get("weights"), rule.get("threshold", 0.3),
                   rule.get("minCapsLetters", 2), rule.get("minPunctuationRun", 2))

    def with_threshold(self, threshold: float) -> 'RuleClassifier':
        weights = {"lexicon": self.lexicon_weight, "caps": self.caps_weight, "punctuation": self.punctuation_weight}
        return RuleClassifier(self.lexicon, weights, threshold, self.min_caps_letters, self.min_punctuation_run)

    def score(self, text: str) -> float:
        words = RULE_WORD_RE.findall(text or "")
        if not words:
            return 0.0
        count = len(words)
        lexicon_rate = sum(self.lexicon.get(w.lower(), 0.0) for w in words) / count
        caps_rate = sum(1 for w in words if w.isupper() and sum(c.isalpha() for c in w) >= self.min_caps_letters) / count
        punctuation_rate = len(self._punctuation_re.findall(text)) / count
        raw = (self.lexicon_weight * lexicon_rate + self.caps_weight * caps_rate
               + self.punctuation_weight * punctuation_rate)
        return min(1.0, max(0.0, raw))

    def classify(self, text: str) -> PanicLabel:
        return PanicLabel.from_score(self.score(text), self.threshold)


class LlmPanicClassifier(PanicClassifier):
    name = "llm-prompt"

    def __init__(self, provider: ChatProvider, template: str, retry_template: str, params: GenerationParams):
        self.provider = provider
        self.template = template
        self.retry_template = retry_template
        self.params = params

    def classify(self, text: str) -> PanicLabel:
        if not (text or "").strip():
            return PanicLabel(PanicClass.NO_PANIC, 0.0)
        tag = "discriminator/" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
        session = AgentSession(tag, self.provider)
        try:
            prompt = render("panic_label", self.template, {"text": text})
            parsed = parse_yes_no(session.complete(prompt, self.params))
            if parsed is None:
                parsed = parse_yes_no(session.complete(self.retry_template, self.params))
        except GatewayError as e:
            raise ClassificationUnavailable(f"Panic classification failed: {e}") from e
        if parsed is None:
            raise ClassificationUnavailable("Panic classification reply has no leading Yes/No.")
        return PanicLabel(PanicClass.from_bool(parsed[0]), 1.0 if parsed[0] else 0.0)


class ExternalPanicClassifier(PanicClassifier):
    """POST {"text": ...} -> {"label": "Panic" | "NoPanic", "score": 0.87}"""
    name = "external-service"

    def __init__(self, url: str, timeout_seconds: float = 60.0, http_session: Optional[requests.Session] = None):
        if not url:
            raise ValueError("External classifier needs a service URL.")
        self.url = url
        self.timeout_seconds = timeout_seconds
        self._http = http_session or requests.Session()

    def classify(self, text: str) -> PanicLabel:
        try:
            response = self._http.post(self.url, json={"text": text}, timeout=self.timeout_seconds)
            response.raise_for_status()
            return PanicLabel.from_dict(response.json())
        except (requests.RequestException, ValueError) as e:
            raise ClassificationUnavailable(f"External panic classifier failed: {e}") from e


def classify_text(text: str, backend: PanicClassifier) -> PanicLabel:
    return backend.classify(text)
