# panic_forecast_tool/agent/scoring.py
# All comments and identifiers in English

from typing import Optional

from ..data_models.agent_types import ArousalFactors, PanicAssessment
from ..data_models.common_types import ProbabilitySource, ToneBand

FACTOR_WEIGHT = 0.25
PANICKED_ABOVE = 0.51
CALM_BELOW = 0.49


def fallback_probability(factors: ArousalFactors) -> float:
    """Each factor adds 0.25 * (score - 1) / 4."""
    return sum(FACTOR_WEIGHT * (score - 1) / 4.0 for score in factors.as_tuple())


def assess_panic(factors: ArousalFactors, reported: Optional[float]) -> PanicAssessment:
    if reported is not None:
        return PanicAssessment(reported, ProbabilitySource.LLM_REPORTED)
    return PanicAssessment(fallback_probability(factors), ProbabilitySource.FALLBACK_FORMULA)


def tone_band(probability: Optional[float], calm_below: float = CALM_BELOW,
              panicked_above: float = PANICKED_ABOVE) -> ToneBand:
    if probability is None:
        return ToneBand.NEUTRAL
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {probability}.")
    if probability > panicked_above:
        return ToneBand.PANICKED
    if probability < calm_below:
        return ToneBand.CALM
    return ToneBand.NEUTRAL
