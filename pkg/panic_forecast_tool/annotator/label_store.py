# panic_forecast_tool/annotator/label_store.py
# All comments and identifiers in English

import logging
from typing import Dict, List, Optional

from ..data_models.annotation_types import AnnotationRecord
from ..data_models.corpus_types import RawPost
from ..data_models.gateway_types import GenerationParams
from ..errors import InsufficientData
from ..llm_gateway.providers import ChatProvider
from ..project_io.json_handler import JsonlStore
from .llm_labels import llm_label_panic, llm_label_relevance
from .merge import merge_labels

logger = logging.getLogger(__name__)


class LabelStore:
    """AnnotationRecords in a line-delimited JSON file keyed by post id."""

    def __init__(self, filepath: str):
        self._store = JsonlStore(filepath, "postId")

    @property
    def filepath(self) -> str:
        return self._store.filepath

    def records(self) -> Dict[str, AnnotationRecord]:
        return {key: AnnotationRecord.from_dict(data) for key, data in self._store.load().items()}

    def get(self, post_id: str) -> Optional[AnnotationRecord]:
        data = self._store.get(post_id)
        return AnnotationRecord.from_dict(data) if data else None

    def save(self, record: AnnotationRecord) -> None:
        self._store.append(record.to_dict())

    def compact(self) -> int:
        return self._store.compact()


class AnnotationPrompts:
    def __init__(self, relevance: str, panic: str, retry_format: str, params: GenerationParams, event_name: str):
        self.relevance = relevance
        self.panic = panic
        self.retry_format = retry_format
        self.params = params
        self.event_name = event_name


def annotate_post(post: RawPost, provider: ChatProvider, prompts: AnnotationPrompts,
                  human_rounds: Dict[int, bool], label_relevance: bool = True,
                  existing: Optional[AnnotationRecord] = None) -> AnnotationRecord:
    record = existing or AnnotationRecord(post.post_id, post.text)
    record.human_rounds.update(human_rounds)
    if label_relevance and (record.llm_relevance is None or not record.llm_relevance.is_labeled):
        record.llm_relevance = llm_label_relevance(post.post_id, post.text, prompts.event_name, provider,
                                                   prompts.relevance, prompts.retry_format, prompts.params)
    if record.llm_panic is None or not record.llm_panic.is_labeled:
        record.llm_panic = llm_label_panic(post.post_id, post.text, provider, prompts.panic,
                                           prompts.retry_format, prompts.params)
    try:
        record.final_label = merge_labels(record)
    except InsufficientData:
        logger.info("Post '%s' stays unlabeled", post.post_id)
    return record


def run_annotation(posts: List[RawPost], store: LabelStore, provider: ChatProvider, prompts: AnnotationPrompts,
                   human_rounds: Optional[Dict[str, Dict[int, bool]]] = None,
                   label_relevance: bool = True) -> Dict[str, int]:
    """
    Labels every post not yet final in the store. Re-running skips finished
    records, so an interrupted pass can be resumed.
    """
    human_rounds = human_rounds or {}
    existing = store.records()
    counts = {"skipped": 0, "labeled": 0, "unlabeled": 0}
    for post in sorted(posts, key=lambda p: p.post_id):
        previous = existing.get(post.post_id)
        if previous is not None and previous.is_final:
            counts["skipped"] += 1
            continue
        record = annotate_post(post, provider, prompts, human_rounds.get(post.post_id, {}), label_relevance,
                               previous)
        store.save(record)
        counts["labeled" if record.is_final else "unlabeled"] += 1
    store.compact()
    logger.info("Annotation pass: %d labeled, %d unlabeled, %d already final",
                counts["labeled"], counts["unlabeled"], counts["skipped"])
    return counts
