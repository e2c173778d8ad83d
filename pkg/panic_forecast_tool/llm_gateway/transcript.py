# panic_forecast_tool/llm_gateway/transcript.py
# All comments and identifiers in English

import hashlib
import json
import logging
import os
import threading
from typing import Dict, Any, List, Optional

from ..project_io.json_handler import write_jsonl, read_jsonl

logger = logging.getLogger(__name__)


def request_hash(body: Dict[str, Any]) -> str:
    """SHA-256 over the canonical (sorted-key, compact) JSON request body."""
    canonical = json.dumps(body, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class TranscriptRecord:
    def __init__(self,
                 session_tag: str,
                 turn_index: int,
                 request_hash_value: str,
                 params: Dict[str, Any],
                 reply: Optional[str],
                 refusal: Optional[str] = None,
                 latency_ms: int = 0,
                 usage: Optional[Dict[str, int]] = None,
                 error: Optional[str] = None):
        self.session_tag: str = session_tag
        self.turn_index: int = turn_index
        self.request_hash: str = request_hash_value
        self.params: Dict[str, Any] = params
        self.reply: Optional[str] = reply
        self.refusal: Optional[str] = refusal
        self.latency_ms: int = latency_ms
        self.usage: Dict[str, int] = usage or {}
        self.error: Optional[str] = error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sessionTag": self.session_tag,
            "turnIndex": self.turn_index,
            "requestHash": self.request_hash,
            "params": self.params,
            "reply": self.reply,
            "refusal": self.refusal,
            "latencyMs": self.latency_ms,
            "usage": self.usage,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TranscriptRecord':
        return cls(
            session_tag=data["sessionTag"],
            turn_index=int(data["turnIndex"]),
            request_hash_value=data.get("requestHash", ""),
            params=data.get("params", {}),
            reply=data.get("reply"),
            refusal=data.get("refusal"),
            latency_ms=int(data.get("latencyMs", 0)),
            usage=data.get("usage", {}),
            error=data.get("error"),
        )


class TranscriptLog:
    """
    Collects one record per provider call and writes them as line-delimited
    JSON sorted by (session tag, turn index) on close, so the file does not
    depend on the order concurrent sessions finished in.
    """

    def __init__(self, filepath: Optional[str] = None, keep_existing: bool = False):
        self.filepath: Optional[str] = filepath
        self._records: List[TranscriptRecord] = []
        self._lock = threading.Lock()
        if keep_existing and filepath and os.path.exists(filepath):
            self._records = [TranscriptRecord.from_dict(d) for d in read_jsonl(filepath)]
            logger.info("Continuing transcript %s (%d existing records)", filepath, len(self._records))

    def append(self, record: TranscriptRecord) -> None:
        with self._lock:
            self._records.append(record)

    @property
    def records(self) -> List[TranscriptRecord]:
        with self._lock:
            # A re-run session replaces the records of its earlier attempt.
            latest = {(r.session_tag, r.turn_index): r for r in self._records}
        return [latest[key] for key in sorted(latest)]

    def close(self) -> None:
        if not self.filepath:
            return
        count = write_jsonl((r.to_dict() for r in self.records), self.filepath)
        logger.info("Transcript with %d records written to %s", count, self.filepath)

    def __enter__(self) -> 'TranscriptLog':
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()
