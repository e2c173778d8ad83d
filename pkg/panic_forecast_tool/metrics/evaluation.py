# panic_forecast_tool/metrics/evaluation.py
# All comments and identifiers in English

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Any

import numpy as np
from sklearn.metrics import roc_auc_score

from ..data_models.common_types import PanicClass
from ..data_models.eval_types import ClassMetricsRow, ConfusionMatrix, EvalReport, UserPrediction

logger = logging.getLogger(__name__)

EXCLUSION_NO_TRUTH = "no-ground-truth"


def confusion(predictions: Dict[str, PanicClass], truths: Dict[str, PanicClass]) -> ConfusionMatrix:
    """Panic is the positive class. Both maps must cover the same users."""
    missing_truth = sorted(set(predictions) - set(truths))
    missing_prediction = sorted(set(truths) - set(predictions))
    if missing_truth or missing_prediction:
        raise ValueError(f"User sets differ: without truth {missing_truth}, without prediction {missing_prediction}")
    m = ConfusionMatrix()
    for user_id, predicted in predictions.items():
        actual = truths[user_id]
        if predicted == PanicClass.PANIC:
            if actual == PanicClass.PANIC:
                m.tp += 1
            else:
                m.fp += 1
        elif actual == PanicClass.PANIC:
            m.fn += 1
        else:
            m.tn += 1
    return m


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else 0.0


def f1_from(precision: float, recall: float) -> float:
    return _ratio(2 * precision * recall, precision + recall)


def class_metrics(m: ConfusionMatrix) -> List[ClassMetricsRow]:
    """Panic row first, then NoPanic (the negative class read as positive)."""
    if m.total == 0:
        raise ValueError("Cannot compute class metrics without evaluated users.")
    rows = []
    for name, tp, fp, fn in ((PanicClass.PANIC.value, m.tp, m.fp, m.fn),
                             (PanicClass.NO_PANIC.value, m.tn, m.fn, m.fp)):
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        rows.append(ClassMetricsRow(name, precision, recall, f1_from(precision, recall), tp + fn))
    return rows


def macro_average(rows: Sequence[ClassMetricsRow], m: ConfusionMatrix) -> Tuple[float, float, float, float]:
    """(accuracy, macro precision, macro recall, macro F1): unweighted means over the class rows."""
    if not rows:
        raise ValueError("macro_average needs class rows.")
    count = len(rows)
    macro_p = sum(r.precision for r in rows) / count
    macro_r = sum(r.recall for r in rows) / count
    macro_f = sum(r.f1 for r in rows) / count
    return _ratio(m.tp + m.tn, m.total), macro_p, macro_r, macro_f


def auc(scores: Sequence[float], truths: Sequence[bool]) -> Optional[float]:
    """Rank-based AUC with half credit for ties; None when only one class is present."""
    labels = np.asarray(truths, dtype=bool)
    if labels.size == 0 or labels.all() or not labels.any():
        return None
    return float(roc_auc_score(labels, np.asarray(scores, dtype=float)))


def evaluate_predictions(predictions: List[UserPrediction], exclusions: Optional[Dict[str, int]] = None,
                         config_overrides: Optional[Dict[str, Any]] = None) -> EvalReport:
    exclusions = dict(exclusions or {})
    judged = [p for p in predictions if p.truth is not None]
    if len(judged) != len(predictions):
        exclusions[EXCLUSION_NO_TRUTH] = exclusions.get(EXCLUSION_NO_TRUTH, 0) + len(predictions) - len(judged)
    if not judged:
        raise ValueError("No prediction has a ground-truth label to evaluate against.")

    m = confusion({p.user_id: p.label.label for p in judged}, {p.user_id: p.truth for p in judged})
    rows = class_metrics(m)
    accuracy, macro_p, macro_r, macro_f = macro_average(rows, m)
    ordered = sorted(judged, key=lambda p: p.user_id)
    area = auc([p.ranking_score for p in ordered], [p.truth == PanicClass.PANIC for p in ordered])
    if area is None:
        logger.warning("AUC undefined: ground truth holds a single class")
    logger.info("Evaluated %d users: accuracy %.4f, macro F1 %.4f", m.total, accuracy, macro_f)
    return EvalReport(rows, m, accuracy, macro_p, macro_r, macro_f, area, exclusions, predictions,
                      config_overrides)
