# panic_forecast_tool/annotator/eda.py
# All comments and identifiers in English

import random
from typing import Dict, List

from ..data_models.annotation_types import EdaConfig

########################################################################
# Operations. Each takes the token list and an edit count n, never
# mutates its input, and never returns an empty list.
########################################################################


def synonym_replace(words: List[str], n: int, rng: random.Random, thesaurus: Dict[str, List[str]]) -> List[str]:
    new_words = list(words)
    candidates = sorted({w.lower() for w in words if thesaurus.get(w.lower())})
    rng.shuffle(candidates)
    for word in candidates[:n]:
        synonym = rng.choice(thesaurus[word])
        new_words = [synonym if w.lower() == word else w for w in new_words]
    return new_words


def random_swap(words: List[str], n: int, rng: random.Random) -> List[str]:
    new_words = list(words)
    if len(new_words) < 2:
        return new_words
    for _ in range(n):
        i, j = rng.sample(range(len(new_words)), 2)
        new_words[i], new_words[j] = new_words[j], new_words[i]
    return new_words


def random_delete(words: List[str], n: int, rng: random.Random) -> List[str]:
    if len(words) <= 1:
        return list(words)
    n = min(n, len(words) - 1)
    dropped = set(rng.sample(range(len(words)), n))
    return [w for i, w in enumerate(words) if i not in dropped]


def random_insert(words: List[str], n: int, rng: random.Random, thesaurus: Dict[str, List[str]]) -> List[str]:
    new_words = list(words)
    for _ in range(n):
        with_synonyms = [w for w in new_words if thesaurus.get(w.lower())]
        if not with_synonyms:
            break
        synonym = rng.choice(thesaurus[rng.choice(with_synonyms).lower()])
        new_words.insert(rng.randint(0, len(new_words)), synonym)
    return new_words


def edit_count(alpha: float, token_count: int) -> int:
    if alpha <= 0:
        return 0
    return max(1, int(round(alpha * token_count)))


def eda_augment(text: str, config: EdaConfig, thesaurus: Dict[str, List[str]]) -> List[str]:
    """
    `variants_per_input` variants, each produced by one enabled operation in
    turn. The generator is seeded from the config seed and the text, so the
    output depends on nothing else.
    """
    words = text.split()
    if not words:
        raise ValueError("eda_augment needs at least one token.")
    operations = config.operations
    if not operations:
        return [text] * config.variants_per_input
    rng = random.Random(f"{config.seed}:{text}")
    variants = []
    for i in range(config.variants_per_input):
        op = operations[i % len(operations)]
        n = edit_count(config.rates[op], len(words))
        if n == 0:
            variants.append(text)
            continue
        if op == "synonym_replace":
            new_words = synonym_replace(words, n, rng, thesaurus)
        elif op == "random_swap":
            new_words = random_swap(words, n, rng)
        elif op == "random_delete":
            new_words = random_delete(words, n, rng)
        else:
            new_words = random_insert(words, n, rng, thesaurus)
        variants.append(" ".join(new_words))
    return variants
