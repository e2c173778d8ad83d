# panic_forecast_tool/agent/prompts.py
# All comments and identifiers in English

import json
import re
from datetime import datetime, timezone
from typing import Dict, List, Any, Optional

from ..data_models.agent_types import DisasterContext, PPDTSItem, PsychKnowledge
from ..data_models.common_types import BIG_FIVE_TRAITS, ToneBand
from ..data_models.gateway_types import ChatMessage
from ..data_models.profile_types import UserProfile
from ..errors import TemplateError, InsufficientData
from ..project_io.assets import load_template

PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

STAGE_TEMPLATE_NAMES = (
    "stage1_perception", "stage2_ppdts", "stage3_arousal", "stage4_generate",
    "style_panicked", "style_calm", "expert_context", "expert_verify", "retry_format",
)


def render(template_name: str, template: str, values: Dict[str, Any]) -> str:
    """Substitutes `{name}` placeholders in one pass; every placeholder must have a value."""
    missing = [name for name in PLACEHOLDER_RE.findall(template) if name not in values]
    if missing:
        raise TemplateError(template_name, missing)
    return PLACEHOLDER_RE.sub(lambda m: str(values[m.group(1)]), template)


class PromptTemplates:
    """The stage templates, loaded once per run."""

    def __init__(self, texts: Dict[str, str]):
        missing = [name for name in STAGE_TEMPLATE_NAMES if name not in texts]
        if missing:
            raise ValueError(f"Missing prompt templates: {missing}")
        self.texts: Dict[str, str] = dict(texts)

    @classmethod
    def load(cls, template_dir: str = "") -> 'PromptTemplates':
        return cls({name: load_template(name, template_dir) for name in STAGE_TEMPLATE_NAMES})

    def __getitem__(self, name: str) -> str:
        return self.texts[name]


def format_utc(timestamp: int) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).strftime("%Y-%m-%d %H:%M")


def render_disaster_table(context: Optional[DisasterContext]) -> str:
    if context is None or context.is_empty:
        raise InsufficientData("Disaster context has no rows to render.")
    lines = [
        "| Time (UTC) | Latitude | Longitude | Max wind (km/h) | Pressure (hPa) | Category |",
        "|---|---|---|---|---|---|",
    ]
    for row in context.rows:
        lines.append(f"| {format_utc(row.timestamp)} | {row.latitude:.2f} | {row.longitude:.2f} | "
                     f"{row.max_wind_kmh:g} | {row.pressure_hpa:g} | {row.category} |")
    return "\n".join(lines)


def profile_payload(profile: UserProfile) -> Dict[str, Any]:
    payload: Dict[str, Any] = {}
    if profile.personality is not None:
        payload["personality"] = {t: round(getattr(profile.personality, t), 3) for t in BIG_FIVE_TRAITS}
    else:
        payload["personality"] = "unavailable"
    if profile.sentiment_trend is not None:
        trend = profile.sentiment_trend
        payload["sentiment"] = {
            "positive": f"{trend.positive * 100:.1f}%",
            "neutral": f"{trend.neutral * 100:.1f}%",
            "negative": f"{trend.negative * 100:.1f}%",
        }
    else:
        payload["sentiment"] = "unavailable"
    payload["interests"] = profile.theme_profile.top_themes[:3] if profile.theme_profile else []
    payload["tone"] = ", ".join(profile.tone.words) if profile.tone else "unavailable"
    risk = profile.risk_comm
    payload["followers"] = risk.follower_count
    payload["followees"] = risk.followee_count
    payload["postsPerDay"] = round(risk.posts_per_day, 2)
    payload["distanceToTrackKm"] = round(risk.distance_to_track_km, 1) \
        if risk.distance_to_track_km is not None else "unavailable"
    payload["relevantPosts"] = profile.relevant_posts
    return payload


def render_user_info(profile: UserProfile) -> str:
    return json.dumps(profile_payload(profile), ensure_ascii=False, indent=2)


def _context_values(knowledge: PsychKnowledge, context: DisasterContext, profile: UserProfile) -> Dict[str, str]:
    return {
        "psychology": knowledge.render(),
        "hurricane_table": render_disaster_table(context),
        "user_info": render_user_info(profile),
    }


def render_stage1(knowledge: PsychKnowledge, context: DisasterContext, profile: UserProfile,
                  templates: PromptTemplates) -> List[ChatMessage]:
    text = render("stage1_perception", templates["stage1_perception"],
                  _context_values(knowledge, context, profile))
    return [ChatMessage.user(text)]


def render_ppdts(items: List[PPDTSItem], templates: PromptTemplates) -> str:
    questions = "\n".join(f"Q{item.item_id}: {item.text}" for item in items)
    return render("stage2_ppdts", templates["stage2_ppdts"], {"questions": questions})


def render_arousal(templates: PromptTemplates) -> str:
    return render("stage3_arousal", templates["stage3_arousal"], {})


def render_feedback(failures: Dict[str, str]) -> str:
    if not failures:
        return ""
    lines = ["", "Expert feedback on your previous tweets (fix every point):"]
    for expert, reason in failures.items():
        lines.append(f"- {expert.capitalize()}: {reason or 'rejected'}")
    return "\n".join(lines)


def render_generation(probability: Optional[float], band: ToneBand, tweet_count: int, templates: PromptTemplates,
                      failures: Optional[Dict[str, str]] = None) -> str:
    style_rules = {
        ToneBand.PANICKED: templates["style_panicked"],
        ToneBand.CALM: templates["style_calm"],
    }.get(band, "")
    values = {
        "tweet_count": tweet_count,
        "panic_probability": format_percent(probability),
        "style_rules": style_rules,
        "feedback": render_feedback(failures or {}),
    }
    return render("stage4_generate", templates["stage4_generate"], values)


def render_expert_system(knowledge: PsychKnowledge, context: DisasterContext, profile: UserProfile,
                         templates: PromptTemplates) -> List[ChatMessage]:
    text = render("expert_context", templates["expert_context"], _context_values(knowledge, context, profile))
    return [ChatMessage.system(text)]


def render_verification(tweets: List[str], event_name: str, probability: Optional[float],
                        templates: PromptTemplates) -> str:
    values = {
        "tweet": " ".join(f"[{t}]" for t in tweets) if len(tweets) > 1 else tweets[0],
        "event_name": event_name,
        "panic_probability": format_percent(probability),
    }
    return render("expert_verify", templates["expert_verify"], values)


def format_percent(probability: Optional[float]) -> str:
    if probability is None:
        return "unknown"
    return f"{probability * 100:g}"
