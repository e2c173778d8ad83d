# panic_forecast_tool/project_io/assets.py
# All comments and identifiers in English

import logging
import os
import re
from typing import Dict, List, FrozenSet, Any

import pandas as pd

from ..data_models.agent_types import PPDTSItem, PsychKnowledge, PPDTS_ITEM_COUNT
from ..data_models.common_types import BIG_FIVE_TRAITS, Subscale
from .json_handler import load_json_document

logger = logging.getLogger(__name__)

ASSETS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "assets")
TEMPLATES_DIR = os.path.join(ASSETS_DIR, "templates")
LEXICONS_DIR = os.path.join(ASSETS_DIR, "lexicons")

_SECTION_HEADER = re.compile(r"^##\s+(.+?)\s*$")


def asset_path(*parts: str) -> str:
    return os.path.join(ASSETS_DIR, *parts)


def load_template(name: str, template_dir: str = "") -> str:
    """
    Reads `<name>.txt`, preferring `template_dir` over the bundled templates.
    Trailing whitespace is dropped so templates compose line by line.
    """
    candidates = [os.path.join(template_dir, f"{name}.txt")] if template_dir else []
    candidates.append(os.path.join(TEMPLATES_DIR, f"{name}.txt"))
    for path in candidates:
        if os.path.exists(path):
            with open(path, 'r', encoding='utf-8') as f:
                return f.read().rstrip()
    raise FileNotFoundError(f"Prompt template '{name}' not found in {candidates}")


def load_ppdts_items(path: str = "") -> List[PPDTSItem]:
    data = load_json_document(path or asset_path("ppdts_items.json"))
    items = [PPDTSItem.from_dict(entry) for entry in data["items"]]
    ids = sorted(item.item_id for item in items)
    if ids != list(range(1, PPDTS_ITEM_COUNT + 1)):
        raise ValueError(f"PPDTS asset must hold items 1..{PPDTS_ITEM_COUNT} exactly, got {ids}")
    ka = sum(1 for item in items if item.subscale == Subscale.KNOWLEDGE_AWARENESS)
    if ka != 10:
        raise ValueError(f"PPDTS asset must hold 10 KA items, got {ka}")
    return sorted(items, key=lambda item: item.item_id)


def load_psych_knowledge(path: str = "") -> PsychKnowledge:
    """Parses the sectioned knowledge text: `## <section>` headers followed by prose."""
    sections: Dict[str, List[str]] = {}
    current = None
    with open(path or asset_path("psych_knowledge.txt"), 'r', encoding='utf-8') as f:
        for line in f:
            header = _SECTION_HEADER.match(line)
            if header:
                current = header.group(1)
                sections[current] = []
            elif current is not None:
                sections[current].append(line.rstrip())
    return PsychKnowledge({name: "\n".join(lines).strip() for name, lines in sections.items()})


def _read_tsv(path: str, columns: List[str]) -> pd.DataFrame:
    frame = pd.read_csv(path, sep="\t", comment="#", header=None, names=columns,
                        dtype=str, keep_default_na=False, encoding="utf-8")
    return frame[frame[columns[0]].str.strip() != ""]


def load_weighted_lexicon(path: str) -> Dict[str, float]:
    """`word<TAB>weight` lines; words are lowercased."""
    frame = _read_tsv(path, ["word", "weight"])
    return {row.word.strip().lower(): float(row.weight) for row in frame.itertuples(index=False)}


def load_trait_lexicon(path: str = "") -> Dict[str, Dict[str, float]]:
    """`word<TAB>trait<TAB>weight` lines -> {word: {trait: weight}}."""
    frame = _read_tsv(path or os.path.join(LEXICONS_DIR, "personality.tsv"), ["word", "trait", "weight"])
    lexicon: Dict[str, Dict[str, float]] = {}
    for row in frame.itertuples(index=False):
        trait = row.trait.strip().lower()
        if trait not in BIG_FIVE_TRAITS:
            raise ValueError(f"{path}: unknown trait '{trait}' for word '{row.word}'")
        weight = float(row.weight)
        if not -1.0 <= weight <= 1.0:
            raise ValueError(f"{path}: weight for '{row.word}' must be in [-1, 1], got {weight}")
        lexicon.setdefault(row.word.strip().lower(), {})[trait] = weight
    return lexicon


def load_sentiment_lexicon(path: str = "") -> Dict[str, float]:
    return load_weighted_lexicon(path or os.path.join(LEXICONS_DIR, "sentiment.tsv"))


def load_panic_lexicon(path: str = "") -> Dict[str, float]:
    return load_weighted_lexicon(path or os.path.join(LEXICONS_DIR, "panic.tsv"))


def load_stopwords(path: str = "") -> FrozenSet[str]:
    words = set()
    with open(path or asset_path("stopwords.txt"), 'r', encoding='utf-8') as f:
        for line in f:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)


def load_thesaurus(path: str = "") -> Dict[str, List[str]]:
    frame = _read_tsv(path or asset_path("thesaurus.tsv"), ["word", "synonyms"])
    return {row.word.strip().lower(): [s.strip() for s in row.synonyms.split(",") if s.strip()]
            for row in frame.itertuples(index=False)}


def load_theme_config(path: str = "") -> Dict[str, Any]:
    return load_json_document(path or asset_path("themes.json"))


def load_panic_rule(path: str = "") -> Dict[str, Any]:
    return load_json_document(path or asset_path("panic_rule.json"))


def load_guidelines() -> str:
    with open(asset_path("crowd_guidelines.md"), 'r', encoding='utf-8') as f:
        return f.read()
