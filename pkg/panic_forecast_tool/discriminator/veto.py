# panic_forecast_tool/discriminator/veto.py
# All comments and identifiers in English

import logging
from typing import Dict, Iterable, List, Optional, Tuple

from ..data_models.agent_types import StageTrace
from ..data_models.common_types import PanicClass
from ..data_models.corpus_types import UserTimeline
from ..data_models.eval_types import PanicLabel, UserPrediction
from ..errors import ClassificationUnavailable
from .classifiers import PanicClassifier

logger = logging.getLogger(__name__)

ABSENT_PROBABILITY_SCORE = 0.5
EXCLUSION_CLASSIFIER = "classification-unavailable"
EXCLUSION_NO_TRACE = "no-trace"


def veto_aggregate(labels: Iterable[PanicLabel]) -> PanicLabel:
    """Panic when at least one member is Panic; the score is the largest member score."""
    labels = list(labels)
    if not labels:
        raise ValueError("veto_aggregate needs at least one label.")
    return PanicLabel(PanicClass.from_bool(any(l.is_panic for l in labels)), max(l.score for l in labels))


def predict_user(trace: StageTrace, backend: PanicClassifier) -> Optional[Tuple[str, PanicLabel, float]]:
    """None for traces whose outcome is not predictable."""
    if not trace.outcome.is_predictable or not trace.candidates:
        return None
    label = veto_aggregate(backend.classify(c.text) for c in trace.candidates)
    probability = trace.panic_probability
    ranking = probability if probability is not None else ABSENT_PROBABILITY_SCORE
    return trace.user_id, label, ranking


def predict_users(traces: List[StageTrace], backend: PanicClassifier,
                  truths: Optional[Dict[str, PanicClass]] = None
                  ) -> Tuple[List[UserPrediction], Dict[str, int]]:
    """Predictions for the predictable traces plus an exclusion count per reason."""
    predictions: List[UserPrediction] = []
    exclusions: Dict[str, int] = {}
    for trace in sorted(traces, key=lambda t: t.user_id):
        try:
            result = predict_user(trace, backend)
        except ClassificationUnavailable as e:
            logger.warning("User '%s' excluded: %s", trace.user_id, e)
            exclusions[EXCLUSION_CLASSIFIER] = exclusions.get(EXCLUSION_CLASSIFIER, 0) + 1
            continue
        if result is None:
            reason = trace.outcome.value
            exclusions[reason] = exclusions.get(reason, 0) + 1
            continue
        user_id, label, ranking = result
        predictions.append(UserPrediction(user_id, label, ranking, (truths or {}).get(user_id)))
    return predictions, exclusions


def label_timeline(timeline: UserTimeline, backend: PanicClassifier) -> PanicLabel:
    """Ground truth from the user's real post-disaster posts."""
    if not timeline.post_posts:
        raise ValueError(f"User '{timeline.user_id}' has no post-disaster posts to label.")
    return veto_aggregate(backend.classify(p.text) for p in timeline.post_posts)
