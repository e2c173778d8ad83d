# panic_forecast_tool/project_io/corpus_reader.py
# All comments and identifiers in English

import json
import logging
import os
from typing import List, Dict, Optional, Iterable

import pandas as pd

from ..data_models.agent_types import DisasterContext, DisasterTrackPoint
from ..data_models.common_types import PanicClass
from ..data_models.corpus_types import RawPost
from ..errors import MalformedCorpusError

logger = logging.getLogger(__name__)

POST_CSV_COLUMNS = ("post_id", "user_id", "timestamp", "text", "latitude", "longitude",
                    "follower_count", "followee_count")
DISASTER_CSV_COLUMNS = ("timestamp", "latitude", "longitude", "max_wind_kmh", "pressure_hpa", "category")


class MalformedRecord:
    def __init__(self, source: str, line_number: Optional[int], reason: str):
        self.source: str = source
        self.line_number: Optional[int] = line_number  # None when the CSV parser dropped the row itself
        self.reason: str = reason

    def to_dict(self):
        return {"source": self.source, "line": self.line_number, "reason": self.reason}


class ReadResult:
    """Posts parsed from one or more corpus files plus the rows that were skipped."""
    def __init__(self):
        self.posts: List[RawPost] = []
        self.malformed: List[MalformedRecord] = []

    @property
    def total_rows(self) -> int:
        return len(self.posts) + len(self.malformed)

    @property
    def malformed_fraction(self) -> float:
        return len(self.malformed) / self.total_rows if self.total_rows else 0.0

    def extend(self, other: 'ReadResult') -> None:
        self.posts.extend(other.posts)
        self.malformed.extend(other.malformed)


def _skip(result: ReadResult, source: str, line_number: Optional[int], reason: str) -> None:
    where = f"{source}:{line_number}" if line_number is not None else source
    logger.warning("Skipping malformed row at %s: %s", where, reason)
    result.malformed.append(MalformedRecord(source, line_number, reason))


def _read_jsonl_posts(filepath: str) -> ReadResult:
    result = ReadResult()
    with open(filepath, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                if not isinstance(data, dict):
                    raise ValueError("line is not a JSON object")
                result.posts.append(RawPost.from_dict(data))
            except (json.JSONDecodeError, ValueError, TypeError) as e:
                _skip(result, filepath, line_number, str(e))
    return result


def _read_csv_posts(filepath: str) -> ReadResult:
    result = ReadResult()

    def _bad_line(fields: List[str]):
        _skip(result, filepath, None, f"wrong field count ({len(fields)}): {fields[:3]}")
        return None

    frame = pd.read_csv(filepath, dtype=str, keep_default_na=False, engine="python",
                        on_bad_lines=_bad_line, encoding="utf-8")
    missing = [c for c in ("post_id", "user_id", "timestamp", "text") if c not in frame.columns]
    if missing:
        raise ValueError(f"{filepath}: CSV header lacks columns {missing}")
    # Header is line 1; row i is line i + 2 as long as no row spans lines.
    for row_index, row in enumerate(frame.to_dict(orient="records")):
        try:
            result.posts.append(RawPost.from_dict(row))
        except (ValueError, TypeError) as e:
            _skip(result, filepath, row_index + 2, str(e))
    return result


def read_posts(filepath: str) -> ReadResult:
    """
    Reads one corpus file. `.csv` files need a header row; anything else is
    treated as line-delimited JSON. Malformed rows are logged and skipped.
    """
    if not os.path.exists(filepath):
        logger.error("Error: corpus file not found at %s", filepath)
        raise FileNotFoundError(filepath)
    if filepath.lower().endswith(".csv"):
        return _read_csv_posts(filepath)
    return _read_jsonl_posts(filepath)


def read_corpus(filepaths: Iterable[str], abort_fraction: float = 0.10) -> ReadResult:
    """
    Reads every corpus file, drops repeated post ids (first occurrence wins)
    and aborts when the malformed share exceeds `abort_fraction`.
    """
    combined = ReadResult()
    for path in filepaths:
        combined.extend(read_posts(path))

    seen = set()
    unique_posts = []
    for post in combined.posts:
        if post.post_id in seen:
            _skip(combined, "corpus", None, f"duplicate post_id '{post.post_id}'")
            continue
        seen.add(post.post_id)
        unique_posts.append(post)
    combined.posts = unique_posts

    if combined.malformed_fraction > abort_fraction:
        raise MalformedCorpusError(len(combined.malformed), combined.total_rows, abort_fraction)
    logger.info("Read %d posts (%d malformed rows skipped)", len(combined.posts), len(combined.malformed))
    return combined


def read_disaster_context(filepath: str, event_name: str, landfall_time: Optional[int] = None) -> DisasterContext:
    """Loads the disaster track CSV; rows are sorted by timestamp."""
    frame = pd.read_csv(filepath, encoding="utf-8")
    missing = [c for c in DISASTER_CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{filepath}: disaster context CSV lacks columns {missing}")
    frame = frame.sort_values("timestamp", kind="mergesort")
    rows = [
        DisasterTrackPoint(
            timestamp=int(r["timestamp"]),
            latitude=float(r["latitude"]),
            longitude=float(r["longitude"]),
            max_wind_kmh=float(r["max_wind_kmh"]),
            pressure_hpa=float(r["pressure_hpa"]),
            category=str(r["category"]),
        )
        for r in frame.to_dict(orient="records")
    ]
    return DisasterContext(event_name, rows, landfall_time)


def read_ground_truth(filepath: str) -> Dict[str, PanicClass]:
    """Line-delimited JSON of {"userId": ..., "label": "Panic" | "NoPanic"}."""
    truths: Dict[str, PanicClass] = {}
    with open(filepath, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                truths[str(data["userId"])] = PanicClass.from_string(data["label"])
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                logger.warning("Skipping malformed label at %s:%d: %s", filepath, line_number, e)
    return truths


def read_human_rounds(filepath: str) -> Dict[str, Dict[int, bool]]:
    """CSV with columns post_id, round, label (yes/no). Later rows overwrite earlier ones."""
    frame = pd.read_csv(filepath, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in ("post_id", "round", "label") if c not in frame.columns]
    if missing:
        raise ValueError(f"{filepath}: human rounds CSV lacks columns {missing}")
    rounds: Dict[str, Dict[int, bool]] = {}
    for row_index, row in enumerate(frame.to_dict(orient="records")):
        label = row["label"].strip().lower()
        if label not in ("yes", "no"):
            logger.warning("Skipping human label at %s:%d: label must be yes/no, got %r",
                           filepath, row_index + 2, row["label"])
            continue
        try:
            round_number = int(row["round"])
        except ValueError:
            logger.warning("Skipping human label at %s:%d: bad round %r", filepath, row_index + 2, row["round"])
            continue
        rounds.setdefault(row["post_id"], {})[round_number] = label == "yes"
    return rounds
