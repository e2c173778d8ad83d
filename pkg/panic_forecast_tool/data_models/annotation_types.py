# panic_forecast_tool/data_models/annotation_types.py
# All comments and identifiers in English

from typing import List, Dict, Any, Optional

from .common_types import PanicClass

EDA_OPERATIONS = ("synonym_replace", "random_swap", "random_delete", "random_insert")


class LlmLabel:
    """A yes/no answer from the labeling prompt; `value` is None when unparseable."""
    def __init__(self, value: Optional[bool], explanation: str = ""):
        self.value: Optional[bool] = value
        self.explanation: str = explanation

    @property
    def is_labeled(self) -> bool:
        return self.value is not None

    def to_dict(self) -> Dict[str, Any]:
        return {"value": None if self.value is None else ("yes" if self.value else "no"),
                "explanation": self.explanation}

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> Optional['LlmLabel']:
        if data is None:
            return None
        raw = data.get("value")
        return cls(None if raw is None else raw == "yes", data.get("explanation", ""))


class AnnotationRecord:
    """
    Labels collected for one post: LLM relevance, LLM panic, up to three human
    rounds, and the merged final label.
    """
    MAX_HUMAN_ROUNDS = 3

    def __init__(self,
                 post_id: str,
                 text: str = "",
                 llm_relevance: Optional[LlmLabel] = None,
                 llm_panic: Optional[LlmLabel] = None,
                 human_rounds: Optional[Dict[int, bool]] = None,
                 final_label: Optional[PanicClass] = None):
        if not post_id:
            raise ValueError("post_id cannot be empty.")
        rounds = dict(human_rounds or {})
        for round_number in rounds:
            if not 1 <= round_number <= self.MAX_HUMAN_ROUNDS:
                raise ValueError(f"Post '{post_id}': human round must be in 1..{self.MAX_HUMAN_ROUNDS}, got {round_number}.")
        self.post_id: str = post_id
        self.text: str = text
        self.llm_relevance: Optional[LlmLabel] = llm_relevance
        self.llm_panic: Optional[LlmLabel] = llm_panic
        self.human_rounds: Dict[int, bool] = rounds
        self.final_label: Optional[PanicClass] = final_label

    @property
    def is_final(self) -> bool:
        return self.final_label is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "postId": self.post_id,
            "text": self.text,
            "llmRelevance": self.llm_relevance.to_dict() if self.llm_relevance else None,
            "llmPanic": self.llm_panic.to_dict() if self.llm_panic else None,
            "humanRounds": {str(k): ("yes" if v else "no") for k, v in sorted(self.human_rounds.items())},
            "finalLabel": self.final_label.value if self.final_label else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AnnotationRecord':
        post_id = data.get("postId")
        if not post_id:
            raise ValueError("postId is required for AnnotationRecord.")
        final = data.get("finalLabel")
        return cls(
            post_id=post_id,
            text=data.get("text", ""),
            llm_relevance=LlmLabel.from_dict(data.get("llmRelevance")),
            llm_panic=LlmLabel.from_dict(data.get("llmPanic")),
            human_rounds={int(k): v == "yes" for k, v in data.get("humanRounds", {}).items()},
            final_label=PanicClass.from_string(final) if final else None,
        )


class EdaConfig:
    """
    Easy-data-augmentation settings. `rates` holds the per-operation alpha;
    an operation is enabled when it appears in `rates`.
    """
    DEFAULT_ALPHA = 0.1

    def __init__(self,
                 rates: Optional[Dict[str, float]] = None,
                 variants_per_input: int = 4,
                 seed: int = 0):
        rates = dict(rates) if rates is not None else {op: self.DEFAULT_ALPHA for op in EDA_OPERATIONS}
        unknown = [op for op in rates if op not in EDA_OPERATIONS]
        if unknown:
            raise ValueError(f"Unknown EDA operations: {unknown}")
        for op, alpha in rates.items():
            if not 0.0 <= alpha <= 1.0:
                raise ValueError(f"EDA rate for '{op}' must be in [0, 1], got {alpha}.")
        if variants_per_input < 0:
            raise ValueError("variants_per_input must be non-negative.")
        # Keep the canonical operation order regardless of input order.
        self.rates: Dict[str, float] = {op: float(rates[op]) for op in EDA_OPERATIONS if op in rates}
        self.variants_per_input: int = int(variants_per_input)
        self.seed: int = int(seed)

    @property
    def operations(self) -> List[str]:
        return list(self.rates)

    def to_dict(self) -> Dict[str, Any]:
        return {"rates": self.rates, "variantsPerInput": self.variants_per_input, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EdaConfig':
        return cls(
            rates=data.get("rates"),
            variants_per_input=int(data.get("variantsPerInput", 4)),
            seed=int(data.get("seed", 0)),
        )
