# panic_forecast_tool/data_models/eval_types.py
# All comments and identifiers in English

from typing import List, Dict, Any, Optional

from .common_types import PanicClass


class PanicLabel:
    """
    Panic/NoPanic decision plus the panic confidence it was derived from.
    """
    def __init__(self, label: PanicClass, score: float):
        if not isinstance(label, PanicClass):
            raise ValueError("label must be an instance of PanicClass enum.")
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {score}.")
        self.label: PanicClass = label
        self.score: float = float(score)

    @classmethod
    def from_score(cls, score: float, threshold: float) -> 'PanicLabel':
        score = min(1.0, max(0.0, score))
        return cls(PanicClass.from_bool(score >= threshold), score)

    @property
    def is_panic(self) -> bool:
        return self.label == PanicClass.PANIC

    def __eq__(self, other) -> bool:
        return isinstance(other, PanicLabel) and self.label == other.label and self.score == other.score

    def __repr__(self) -> str:
        return f"PanicLabel({self.label.value}, {self.score:.4f})"

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label.value, "score": self.score}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PanicLabel':
        label = data.get("label")
        if not label:
            raise ValueError("label is required for PanicLabel.")
        return cls(PanicClass.from_string(label), float(data.get("score", 1.0 if label == "Panic" else 0.0)))


class ConfusionMatrix:
    """Binary confusion counts with Panic as the positive class."""
    def __init__(self, tp: int = 0, fp: int = 0, fn: int = 0, tn: int = 0):
        for name, value in (("tp", tp), ("fp", fp), ("fn", fn), ("tn", tn)):
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}.")
        self.tp: int = int(tp)
        self.fp: int = int(fp)
        self.fn: int = int(fn)
        self.tn: int = int(tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> Dict[str, Any]:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConfusionMatrix':
        return cls(data.get("tp", 0), data.get("fp", 0), data.get("fn", 0), data.get("tn", 0))


class ClassMetricsRow:
    def __init__(self, class_name: str, precision: float, recall: float, f1: float, support: int):
        self.class_name: str = class_name
        self.precision: float = precision
        self.recall: float = recall
        self.f1: float = f1
        self.support: int = support

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class": self.class_name,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ClassMetricsRow':
        return cls(data["class"], data["precision"], data["recall"], data["f1"], data["support"])


class UserPrediction:
    """One user-level prediction as fed into the evaluation."""
    def __init__(self, user_id: str, label: PanicLabel, ranking_score: float,
                 truth: Optional[PanicClass] = None):
        self.user_id: str = user_id
        self.label: PanicLabel = label
        self.ranking_score: float = ranking_score
        self.truth: Optional[PanicClass] = truth

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "userId": self.user_id,
            "label": self.label.label.value,
            "score": self.label.score,
            "rankingScore": self.ranking_score,
        }
        if self.truth is not None:
            data["truth"] = self.truth.value
        return data


class EvalReport:
    """
    Table-1 style evaluation: per-class rows, macro averages, accuracy, AUC
    and the ledger of excluded users.
    """
    def __init__(self,
                 rows: List[ClassMetricsRow],
                 confusion: ConfusionMatrix,
                 accuracy: float,
                 macro_precision: float,
                 macro_recall: float,
                 macro_f1: float,
                 auc: Optional[float],
                 exclusions: Optional[Dict[str, int]] = None,
                 predictions: Optional[List[UserPrediction]] = None,
                 config_overrides: Optional[Dict[str, Any]] = None):
        self.rows: List[ClassMetricsRow] = rows
        self.confusion: ConfusionMatrix = confusion
        self.accuracy: float = accuracy
        self.macro_precision: float = macro_precision
        self.macro_recall: float = macro_recall
        self.macro_f1: float = macro_f1
        self.auc: Optional[float] = auc
        self.exclusions: Dict[str, int] = exclusions if exclusions is not None else {}
        self.predictions: List[UserPrediction] = predictions if predictions is not None else []
        self.config_overrides: Dict[str, Any] = config_overrides if config_overrides is not None else {}

        if sum(row.support for row in self.rows) != self.confusion.total:
            raise ValueError("Class supports must sum to the evaluated count.")

    @property
    def evaluated_count(self) -> int:
        return self.confusion.total

    def row(self, class_name: str) -> ClassMetricsRow:
        for row in self.rows:
            if row.class_name == class_name:
                return row
        raise KeyError(class_name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": [row.to_dict() for row in self.rows],
            "confusion": self.confusion.to_dict(),
            "accuracy": self.accuracy,
            "macroPrecision": self.macro_precision,
            "macroRecall": self.macro_recall,
            "macroF1": self.macro_f1,
            "auc": self.auc,
            "evaluatedCount": self.evaluated_count,
            "exclusions": dict(sorted(self.exclusions.items())),
            "predictions": [p.to_dict() for p in sorted(self.predictions, key=lambda p: p.user_id)],
            "configOverrides": self.config_overrides,
        }
