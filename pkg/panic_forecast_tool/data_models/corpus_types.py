# panic_forecast_tool/data_models/corpus_types.py
# All comments and identifiers in English

from typing import List, Dict, Any, Optional, Set

from .eval_types import PanicLabel


class RawPost:
    """
    A single social-media post as ingested from the corpus files.
    """
    def __init__(self,
                 post_id: str,
                 user_id: str,
                 timestamp: int,
                 text: str,
                 latitude: Optional[float] = None,
                 longitude: Optional[float] = None,
                 follower_count: int = 0,
                 followee_count: int = 0):
        if not post_id:
            raise ValueError("post_id cannot be empty.")
        if not user_id:
            raise ValueError("user_id cannot be empty.")
        if timestamp is None or timestamp <= 0:
            raise ValueError(f"Post '{post_id}': timestamp must be > 0, got {timestamp}.")
        if follower_count < 0 or followee_count < 0:
            raise ValueError(f"Post '{post_id}': follower/followee counts must be non-negative.")
        if (latitude is None) != (longitude is None):
            raise ValueError(f"Post '{post_id}': latitude and longitude must be given together.")

        self.post_id: str = str(post_id)
        self.user_id: str = str(user_id)
        self.timestamp: int = int(timestamp)
        self.text: str = text if text is not None else ""
        self.latitude: Optional[float] = latitude
        self.longitude: Optional[float] = longitude
        self.follower_count: int = int(follower_count)
        self.followee_count: int = int(followee_count)

    @property
    def has_coordinates(self) -> bool:
        return self.latitude is not None and self.longitude is not None

    def with_text(self, text: str) -> "RawPost":
        return RawPost(self.post_id, self.user_id, self.timestamp, text,
                       self.latitude, self.longitude, self.follower_count, self.followee_count)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "post_id": self.post_id,
            "user_id": self.user_id,
            "timestamp": self.timestamp,
            "text": self.text,
            "follower_count": self.follower_count,
            "followee_count": self.followee_count,
        }
        if self.has_coordinates:
            data["latitude"] = self.latitude
            data["longitude"] = self.longitude
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RawPost':
        # Input files use the field names of the type, not camelCase.
        for required in ("post_id", "user_id", "timestamp"):
            if data.get(required) in (None, ""):
                raise ValueError(f"{required} is required for RawPost.")
        latitude = data.get("latitude")
        longitude = data.get("longitude")
        return cls(
            post_id=str(data["post_id"]),
            user_id=str(data["user_id"]),
            timestamp=int(float(data["timestamp"])),
            text=str(data.get("text") or ""),
            latitude=float(latitude) if latitude not in (None, "") else None,
            longitude=float(longitude) if longitude not in (None, "") else None,
            follower_count=int(float(data.get("follower_count") or 0)),
            followee_count=int(float(data.get("followee_count") or 0)),
        )


class UserTimeline:
    """
    One user's posts split around the disaster time.
    pre_posts and post_posts are kept sorted ascending by timestamp.
    """
    def __init__(self,
                 user_id: str,
                 pre_posts: Optional[List[RawPost]] = None,
                 post_posts: Optional[List[RawPost]] = None,
                 ground_truth: Optional[PanicLabel] = None):
        if not user_id:
            raise ValueError("user_id cannot be empty.")
        self.user_id: str = user_id
        self.pre_posts: List[RawPost] = sorted(pre_posts or [], key=lambda p: p.timestamp)
        self.post_posts: List[RawPost] = sorted(post_posts or [], key=lambda p: p.timestamp)
        self.ground_truth: Optional[PanicLabel] = ground_truth

    def validate_boundary(self, disaster_time: int) -> None:
        for post in self.pre_posts:
            if post.timestamp >= disaster_time:
                raise ValueError(f"User '{self.user_id}': pre-phase post '{post.post_id}' is not before the disaster time.")
        for post in self.post_posts:
            if post.timestamp < disaster_time:
                raise ValueError(f"User '{self.user_id}': post-phase post '{post.post_id}' is before the disaster time.")

    @property
    def all_posts(self) -> List[RawPost]:
        return self.pre_posts + self.post_posts

    def latest_network_counts(self) -> Dict[str, int]:
        """Follower/followee counts from the most recent pre-disaster post."""
        source = self.pre_posts[-1] if self.pre_posts else (self.post_posts[-1] if self.post_posts else None)
        if source is None:
            return {"follower_count": 0, "followee_count": 0}
        return {"follower_count": source.follower_count, "followee_count": source.followee_count}

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "userId": self.user_id,
            "prePosts": [p.to_dict() for p in self.pre_posts],
            "postPosts": [p.to_dict() for p in self.post_posts],
        }
        if self.ground_truth is not None:
            data["groundTruth"] = self.ground_truth.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UserTimeline':
        user_id = data.get("userId")
        if not user_id:
            raise ValueError("userId is required for UserTimeline.")
        truth = data.get("groundTruth")
        return cls(
            user_id=user_id,
            pre_posts=[RawPost.from_dict(p) for p in data.get("prePosts", [])],
            post_posts=[RawPost.from_dict(p) for p in data.get("postPosts", [])],
            ground_truth=PanicLabel.from_dict(truth) if truth else None,
        )


class CorpusPartition:
    """
    Train/test split of the selected users.
    """
    def __init__(self, train: Set[str], test: Set[str], seed: int, ratio: float):
        overlap = set(train) & set(test)
        if overlap:
            raise ValueError(f"train and test partitions overlap: {sorted(overlap)}")
        self.train: Set[str] = set(train)
        self.test: Set[str] = set(test)
        self.seed: int = int(seed)
        self.ratio: float = float(ratio)

    @property
    def all_users(self) -> Set[str]:
        return self.train | self.test

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "ratio": self.ratio,
            "train": sorted(self.train),
            "test": sorted(self.test),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CorpusPartition':
        if "seed" not in data or "ratio" not in data:
            raise ValueError("seed and ratio are required for CorpusPartition.")
        return cls(
            train=set(data.get("train", [])),
            test=set(data.get("test", [])),
            seed=data["seed"],
            ratio=data["ratio"],
        )
