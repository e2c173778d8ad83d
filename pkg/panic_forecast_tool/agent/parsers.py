# panic_forecast_tool/agent/parsers.py
# All comments and identifiers in English

import re
from typing import Dict, List, Optional, Tuple

from ..data_models.agent_types import (ArousalFactors, ExpertJudgement, ExpertVerdict, PPDTSResponse,
                                       TweetCandidate, PPDTS_ITEM_COUNT, AROUSAL_FACTOR_NAMES)
from ..errors import ArousalParseError, GenerationParseError, VerdictParseError

TERMINATOR = "### End"

_LIST_PREFIX = r"^\s*(?:[-*•]\s*|\d+[.)]\s*)?"
PPDTS_LINE_RE = re.compile(_LIST_PREFIX + r"Q\s*(\d+)\s*[:.\-]\s*(\d+)\b(.*)$", re.IGNORECASE)
AROUSAL_LINE_RE = re.compile(_LIST_PREFIX + r"([A-Za-z][A-Za-z ]*?)\s*:\s*(\d+)\s*/\s*5\b(.*)$")
PROBABILITY_RE = re.compile(r"\[\s*(\d{1,3}(?:\.\d+)?)\s*%\s*\]")
VERDICT_LINE_RE = re.compile(_LIST_PREFIX + r"([A-Za-z][A-Za-z /]*?)\s*:\s*(YES|NO)\b(.*)$", re.IGNORECASE)
TWEET_RE = re.compile(r"\[([^\[\]]+)\]")
HASHTAG_RE = re.compile(r"#\w+")

# Canonical factor for each accepted name prefix.
FACTOR_PREFIXES = (("awareness", "awareness"), ("coping", "coping"),
                   ("uncertainty", "uncertainty"), ("novelty", "novelty"))
EXPERT_PREFIXES = (("psych", "psychological"), ("ling", "linguistic"), ("fact", "factual"),
                   ("panic", "emotional"), ("emotion", "emotional"))


def _clean(line: str) -> str:
    return line.replace("**", "").replace("__", "").strip()


def _reason(rest: str) -> str:
    rest = rest.strip().rstrip(";").strip()
    start, end = rest.find("("), rest.rfind(")")
    if start != -1 and end > start:
        return rest[start + 1:end].strip()
    return rest.strip(" -:")


def parse_ppdts(text: str) -> PPDTSResponse:
    """
    Partial or malformed answers give an invalid response, never an
    exception. The first line naming an item claims it, even when its score
    is out of range and gets dropped.
    """
    scores: Dict[int, int] = {}
    reasons: Dict[int, str] = {}
    seen = set()
    for line in (text or "").splitlines():
        match = PPDTS_LINE_RE.match(_clean(line))
        if not match:
            continue
        item_id, score = int(match.group(1)), int(match.group(2))
        if item_id in seen:
            continue
        seen.add(item_id)
        if not 1 <= item_id <= PPDTS_ITEM_COUNT or not 1 <= score <= 4:
            continue
        scores[item_id] = score
        reasons[item_id] = _reason(match.group(3))
    return PPDTSResponse(scores, reasons)


def _canonical(name: str, prefixes) -> Optional[str]:
    name = name.strip().lower()
    for prefix, canonical in prefixes:
        if name.startswith(prefix):
            return canonical
    return None


def parse_arousal(text: str) -> Tuple[ArousalFactors, Optional[float]]:
    scores: Dict[str, int] = {}
    reasons: Dict[str, str] = {}
    for line in (text or "").splitlines():
        match = AROUSAL_LINE_RE.match(_clean(line))
        if not match:
            continue
        factor = _canonical(match.group(1), FACTOR_PREFIXES)
        if factor is None or factor in scores:
            continue
        score = int(match.group(2))
        if not 1 <= score <= 5:
            raise ArousalParseError(f"Arousal factor '{factor}' scored {score}, outside 1..5", text)
        scores[factor] = score
        reasons[factor] = _reason(match.group(3))
    missing = [name for name in AROUSAL_FACTOR_NAMES if name not in scores]
    if missing:
        raise ArousalParseError(f"Arousal reply lacks factors {missing}", text)

    reported = None
    percents = PROBABILITY_RE.findall((text or "").replace("**", ""))
    if percents:
        value = float(percents[-1])
        if value <= 100.0:
            reported = value / 100.0
    return ArousalFactors(scores, reasons), reported


def parse_tweets(text: str, n: int) -> List[TweetCandidate]:
    """Up to `n` bracketed tweets before the terminator."""
    text = text or ""
    if TERMINATOR not in text:
        raise GenerationParseError("Generation reply lacks the '### End' terminator", text)
    body = text.split(TERMINATOR, 1)[0]
    segments = [s.strip() for s in TWEET_RE.findall(body) if s.strip()]
    if not segments:
        raise GenerationParseError("Generation reply holds no bracketed tweet", text)
    return [TweetCandidate(s, HASHTAG_RE.findall(s)) for s in segments[:n]]


def parse_verdict(text: str) -> ExpertVerdict:
    judgements: Dict[str, ExpertJudgement] = {}
    for line in (text or "").splitlines():
        match = VERDICT_LINE_RE.match(_clean(line))
        if not match:
            continue
        expert = _canonical(match.group(1), EXPERT_PREFIXES)
        if expert is None or expert in judgements:
            continue
        judgements[expert] = ExpertJudgement(match.group(2).upper() == "YES", _reason(match.group(3)))
    if len(judgements) != 4:
        missing = sorted({canonical for _, canonical in EXPERT_PREFIXES} - set(judgements))
        raise VerdictParseError(f"Expert verdict lacks lines for {missing}", text)
    return ExpertVerdict(judgements)
