# panic_forecast_tool/discriminator/calibration.py
# All comments and identifiers in English

import logging
from typing import List, Tuple

import numpy as np
from sklearn.metrics import f1_score

from .classifiers import RuleClassifier

logger = logging.getLogger(__name__)


def calibrate_threshold(texts: List[str], labels: List[bool], classifier: RuleClassifier) -> Tuple[float, float]:
    """
    Chooses the rule threshold maximizing Panic-class F1 over the observed
    scores; ties go to the lower threshold. Returns (threshold, f1).
    """
    if len(texts) != len(labels):
        raise ValueError("texts and labels must have the same length.")
    if not texts:
        raise ValueError("Calibration needs at least one labeled text.")
    scores = np.array([classifier.score(t) for t in texts])
    truth = np.array(labels, dtype=bool)
    best_threshold, best_f1 = classifier.threshold, -1.0
    for candidate in np.unique(scores):
        if candidate <= 0.0:
            continue
        f1 = f1_score(truth, scores >= candidate, zero_division=0)
        if f1 > best_f1 + 1e-12:
            best_threshold, best_f1 = float(candidate), float(f1)
    if best_f1 < 0:
        best_f1 = float(f1_score(truth, scores >= best_threshold, zero_division=0))
    logger.info("Calibrated rule threshold %.4f (F1 %.4f over %d texts)", best_threshold, best_f1, len(texts))
    return best_threshold, best_f1
