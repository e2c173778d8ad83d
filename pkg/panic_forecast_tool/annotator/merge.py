# panic_forecast_tool/annotator/merge.py
# All comments and identifiers in English

from ..data_models.annotation_types import AnnotationRecord
from ..data_models.common_types import PanicClass
from ..errors import InsufficientData


def merge_labels(record: AnnotationRecord) -> PanicClass:
    """
    Majority over the LLM panic label and the human rounds. A tie goes to
    the human majority, and a human tie to NoPanic.
    """
    human = list(record.human_rounds.values())
    votes = list(human)
    if record.llm_panic is not None and record.llm_panic.is_labeled:
        votes.append(record.llm_panic.value)
    if not votes:
        raise InsufficientData(f"Post '{record.post_id}' has no labels to merge.")

    yes = sum(1 for v in votes if v)
    no = len(votes) - yes
    if yes != no:
        return PanicClass.from_bool(yes > no)
    human_yes = sum(1 for v in human if v)
    human_no = len(human) - human_yes
    return PanicClass.from_bool(human_yes > human_no)
