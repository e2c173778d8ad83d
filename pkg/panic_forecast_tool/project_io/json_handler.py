# panic_forecast_tool/project_io/json_handler.py
# All comments and identifiers in English

import json
import logging
import os
import threading
from typing import Dict, Any, Iterable, Iterator, List, Optional, Callable

from ..data_models.run_config import RunConfig
from ..data_models.corpus_types import CorpusPartition
from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

# Define the current version of the JSON format this handler supports.
# This should match RunMetadata.format_version for new run configurations.
SUPPORTED_FORMAT_VERSION = "1.0.0"


def _ensure_parent_dir(filepath: str) -> None:
    dir_name = os.path.dirname(filepath)
    if dir_name:  # filepath may be a bare filename
        os.makedirs(dir_name, exist_ok=True)


def new_run_config(run_name: str = "New Panic Forecast Run", author: str = "") -> RunConfig:
    """
    Creates a RunConfig with default settings and metadata.
    """
    config = RunConfig()
    config.run_metadata.run_name = run_name
    config.run_metadata.author = author
    config.run_metadata.format_version = SUPPORTED_FORMAT_VERSION
    return config


def save_run_config(config: RunConfig, filepath: str) -> None:
    """
    Serializes the RunConfig to JSON and saves it to `filepath`.
    Raises:
        TypeError: If config is not a RunConfig instance.
        IOError: If the file cannot be written.
    """
    if not isinstance(config, RunConfig):
        raise TypeError("config must be an instance of RunConfig.")
    try:
        config.run_metadata.format_version = SUPPORTED_FORMAT_VERSION
        save_json_document(config.to_dict(), filepath)
        logger.info("Run configuration saved successfully to %s", filepath)
    except IOError as e:
        logger.error("Error saving run configuration to %s: %s", filepath, e)
        raise


def load_run_config(filepath: str) -> RunConfig:
    """
    Loads a run configuration file.
    Raises:
        FileNotFoundError: If the file does not exist.
        json.JSONDecodeError: If the content is not valid JSON.
        ConfigurationError: If a section fails validation.
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            data_dict = json.load(f)

        format_version = data_dict.get("runMetadata", {}).get("formatVersion")
        if format_version and format_version != SUPPORTED_FORMAT_VERSION:
            logger.warning("Run configuration format version '%s' is different from supported version '%s'. "
                           "Attempting to load anyway.", format_version, SUPPORTED_FORMAT_VERSION)

        config = RunConfig.from_dict(data_dict)

        if config.run_metadata.format_version != SUPPORTED_FORMAT_VERSION:
            logger.info("Run metadata format version updated to '%s' upon loading.", SUPPORTED_FORMAT_VERSION)
            config.run_metadata.format_version = SUPPORTED_FORMAT_VERSION

        # Relative paths inside the file resolve against the file's directory.
        _resolve_relative_paths(config, os.path.dirname(os.path.abspath(filepath)))
        logger.info("Run configuration loaded successfully from %s", filepath)
        return config

    except FileNotFoundError:
        logger.error("Error: run configuration not found at %s", filepath)
        raise
    except json.JSONDecodeError as e:
        logger.error("Error decoding JSON from %s: %s", filepath, e)
        raise
    except ValueError as e:  # from the from_dict validators
        logger.error("Error validating run configuration from %s: %s", filepath, e)
        raise ConfigurationError(f"{filepath}: {e}") from e


def _resolve_relative_paths(config: RunConfig, base_dir: str) -> None:
    def _abs(path: str) -> str:
        if not path or os.path.isabs(path):
            return path
        return os.path.normpath(os.path.join(base_dir, path))

    config.corpus.post_paths = [_abs(p) for p in config.corpus.post_paths]
    config.corpus.disaster_context_path = _abs(config.corpus.disaster_context_path)
    config.corpus.labels_path = _abs(config.corpus.labels_path)
    config.simulate.mock_script_path = _abs(config.simulate.mock_script_path)
    config.annotation.human_rounds_path = _abs(config.annotation.human_rounds_path)
    config.backends.panic_rule_path = _abs(config.backends.panic_rule_path)
    config.template_dir = _abs(config.template_dir)
    config.out_dir = _abs(config.out_dir)


# --- Generic documents ---

def save_json_document(data: Any, filepath: str) -> None:
    """Writes `data` as sorted-key, indented UTF-8 JSON."""
    _ensure_parent_dir(filepath)
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def load_json_document(filepath: str) -> Any:
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        logger.error("Error: file not found at %s", filepath)
        raise
    except json.JSONDecodeError as e:
        logger.error("Error decoding JSON from %s: %s", filepath, e)
        raise


def save_partition(partition: CorpusPartition, filepath: str) -> None:
    save_json_document(partition.to_dict(), filepath)
    logger.info("Partition saved successfully to %s (%d train / %d test)",
                filepath, len(partition.train), len(partition.test))


def load_partition(filepath: str) -> CorpusPartition:
    try:
        return CorpusPartition.from_dict(load_json_document(filepath))
    except ValueError as e:
        logger.error("Error validating partition from %s: %s", filepath, e)
        raise


# --- Line-delimited JSON ---

def _dump_line(record: Dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def iter_jsonl(filepath: str) -> Iterator[Dict[str, Any]]:
    """Yields one dict per non-blank line."""
    with open(filepath, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                logger.error("Error decoding JSON at %s:%d: %s", filepath, line_number, e)
                raise


def read_jsonl(filepath: str) -> List[Dict[str, Any]]:
    return list(iter_jsonl(filepath))


def write_jsonl(records: Iterable[Dict[str, Any]], filepath: str) -> int:
    """Overwrites `filepath` with one record per line. Returns the record count."""
    _ensure_parent_dir(filepath)
    count = 0
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(_dump_line(record) + "\n")
            count += 1
    return count


class JsonlStore:
    """
    Append-only line-delimited JSON store keyed by one record field.

    Appends are serialized by a lock so concurrent workers can share one
    store. `compact()` rewrites the file sorted by key, keeping the last
    record written for each key.
    """

    def __init__(self, filepath: str, key_field: str):
        self.filepath: str = filepath
        self.key_field: str = key_field
        self._lock = threading.Lock()
        _ensure_parent_dir(filepath)

    def exists(self) -> bool:
        return os.path.exists(self.filepath)

    def load(self) -> Dict[str, Dict[str, Any]]:
        """Latest record per key."""
        if not self.exists():
            return {}
        records: Dict[str, Dict[str, Any]] = {}
        for record in iter_jsonl(self.filepath):
            key = record.get(self.key_field)
            if key is None:
                logger.warning("Record without '%s' skipped in %s", self.key_field, self.filepath)
                continue
            records[str(key)] = record
        return records

    def keys(self) -> List[str]:
        return sorted(self.load())

    def get(self, key: str) -> Optional[Dict[str, Any]]:
        return self.load().get(key)

    def append(self, record: Dict[str, Any]) -> None:
        if self.key_field not in record:
            raise ValueError(f"Record is missing key field '{self.key_field}'.")
        line = _dump_line(record) + "\n"
        with self._lock:
            with open(self.filepath, 'a', encoding='utf-8', newline='\n') as f:
                f.write(line)

    def reset(self) -> None:
        with self._lock:
            open(self.filepath, 'w', encoding='utf-8').close()

    def compact(self, sort_key: Optional[Callable[[Dict[str, Any]], Any]] = None) -> int:
        """Rewrites the store sorted by key; returns the number of records kept."""
        with self._lock:
            records = self.load()
            ordered = sorted(records.values(), key=sort_key or (lambda r: str(r[self.key_field])))
            return write_jsonl(ordered, self.filepath)
