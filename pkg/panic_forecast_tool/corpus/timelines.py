# panic_forecast_tool/corpus/timelines.py
# All comments and identifiers in English

import logging
import math
from typing import List, Dict, Iterable, Tuple, Any

import numpy as np

from ..data_models.corpus_types import RawPost, UserTimeline, CorpusPartition
from ..data_models.run_config import Thresholds
from .text_cleaning import sanitize_text, meaningful_token_count, dedup_corpus

logger = logging.getLogger(__name__)

DEFAULT_MIN_PRE_POSTS = 10


def temporal_split(posts: List[RawPost], disaster_time: int) -> Tuple[List[RawPost], List[RawPost]]:
    """Order-preserving split; a post exactly at the disaster time is post-phase."""
    pre = [p for p in posts if p.timestamp < disaster_time]
    post = [p for p in posts if p.timestamp >= disaster_time]
    return pre, post


def build_timelines(posts: Iterable[RawPost], disaster_time: int) -> Dict[str, UserTimeline]:
    by_user: Dict[str, List[RawPost]] = {}
    for post in posts:
        by_user.setdefault(post.user_id, []).append(post)
    timelines = {}
    for user_id in sorted(by_user):
        pre, post = temporal_split(sorted(by_user[user_id], key=lambda p: p.timestamp), disaster_time)
        timelines[user_id] = UserTimeline(user_id, pre, post)
    return timelines


def select_users(timelines: Iterable[UserTimeline], min_pre: int = DEFAULT_MIN_PRE_POSTS) -> List[UserTimeline]:
    """Users active in both phases with at least `min_pre` pre-disaster posts."""
    return [t for t in timelines if len(t.post_posts) >= 1 and len(t.pre_posts) >= min_pre]


def _round_half_up(value: float) -> int:
    # Absorb float noise such as 0.2 * 10 = 1.9999999999999996.
    return int(math.floor(value + 0.5 + 1e-9))


def split_train_test(user_ids: Iterable[str], ratio: float, seed: int) -> CorpusPartition:
    users = sorted(set(user_ids))
    if not users:
        raise ValueError("Cannot split an empty user set.")
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}.")
    test_size = _round_half_up((1.0 - ratio) * len(users))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(users))
    test = {users[i] for i in order[:test_size]}
    train = {users[i] for i in order[test_size:]}
    return CorpusPartition(train, test, seed, ratio)


class IngestStats:
    """Counts gathered while preparing the corpus, reported by `ingest`."""
    def __init__(self):
        self.raw_posts: int = 0
        self.malformed_rows: int = 0
        self.short_posts: int = 0
        self.duplicate_posts: int = 0
        self.users_total: int = 0
        self.users_retained: int = 0
        self.pre_posts: int = 0
        self.post_posts: int = 0
        self.panic_users: int = 0
        self.no_panic_users: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rawPosts": self.raw_posts,
            "malformedRows": self.malformed_rows,
            "shortPosts": self.short_posts,
            "duplicatePosts": self.duplicate_posts,
            "usersTotal": self.users_total,
            "usersRetained": self.users_retained,
            "prePosts": self.pre_posts,
            "postPosts": self.post_posts,
            "panicUsers": self.panic_users,
            "noPanicUsers": self.no_panic_users,
        }


def prepare_timelines(posts: List[RawPost], disaster_time: int, thresholds: Thresholds,
                      stats: IngestStats) -> List[UserTimeline]:
    """
    sanitize -> drop short posts -> per-user dedup -> phase split -> user
    selection. Returns retained timelines sorted by user id.
    """
    stats.raw_posts += len(posts)
    cleaned = []
    for post in posts:
        text = sanitize_text(post.text)
        if meaningful_token_count(text) < thresholds.min_meaningful_tokens:
            stats.short_posts += 1
            continue
        cleaned.append(post.with_text(text))
    cleaned.sort(key=lambda p: (p.timestamp, p.post_id))

    kept, dropped = dedup_corpus(cleaned, thresholds.dedup_similarity)
    stats.duplicate_posts += len(dropped)
    for dropped_id, retained_id in dropped:
        logger.debug("Post %s dropped as near-duplicate of %s", dropped_id, retained_id)

    timelines = build_timelines(kept, disaster_time)
    stats.users_total = len(timelines)
    retained = select_users(timelines.values(), thresholds.min_pre_posts)
    stats.users_retained = len(retained)
    stats.pre_posts = sum(len(t.pre_posts) for t in retained)
    stats.post_posts = sum(len(t.post_posts) for t in retained)
    logger.info("Retained %d of %d users (%d short, %d duplicate posts removed)",
                stats.users_retained, stats.users_total, stats.short_posts, stats.duplicate_posts)
    return retained
