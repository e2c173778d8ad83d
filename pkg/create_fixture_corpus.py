# create_fixture_corpus.py
# Writes the synthetic 25-user fixture: posts, disaster track, labels,
# human rounds, a scripted mock provider and the run configuration.
# All comments and identifiers in English.

import argparse
import csv
import json
import logging
import os
import random
from typing import Any, Dict, List

logger = logging.getLogger(__name__)

# --- Configuration ---
DISASTER_TIME = 1351468800  # 2012-10-29 00:00 UTC
SECONDS_PER_DAY = 86400
FIXTURE_SEED = 2012
EVENT_NAME = "Hurricane Sandy"

RETAINED_USERS = [f"u{i:02d}" for i in range(1, 26)]
FEW_PRE_POSTS_USER = "u26"  # six pre-disaster posts, below the selection minimum
NO_POST_PHASE_USER = "u27"  # silent after the disaster
PRE_POSTS_PER_USER = 12
POST_POSTS_PER_USER = 2

PANIC_USERS = [f"u{i:02d}" for i in range(2, 21, 2)]
INVALID_QUESTIONNAIRE_USER = "u03"  # answers 17 of 18 items
REFUSING_USER = "u05"  # refused at the perception stage
REGENERATED_USER = "u07"  # first verdict rejects, second passes
AROUSAL_RETRY_USER = "u09"  # first arousal reply scores out of range
GENERATION_RETRY_USER = "u11"  # first generation reply lacks the terminator
FALLBACK_USER = "u13"  # no reported percentage, no tone script
UNVERIFIED_USER = "u15"  # every verdict rejects
MISSED_PANIC_USER = "u20"  # Panic in truth, calm generation
FALSE_ALARM_USER = "u21"  # NoPanic in truth, panicked generation

DUPLICATE_POST_USERS = [u for u in RETAINED_USERS if int(u[1:]) % 5 == 0]
SHORT_POST_USERS = [u for u in RETAINED_USERS if int(u[1:]) % 4 == 0]
GEOTAGGED_USERS = [u for u in RETAINED_USERS if int(u[1:]) % 3 == 0]
HUMAN_ROUND_USERS = ["u01", "u02", "u04"]
MALFORMED_LINES = ['{"post_id": "broken", "user_id": ', '{"post_id": "x-1", "timestamp": 1351000000, "text": "no user"}']

WEATHER_WORDS = ["hurricane", "storm", "wind", "rain", "flood", "surge", "weather", "forecast", "coast",
                 "evacuation", "shelter", "power", "outage", "water", "tide", "clouds"]
DAILY_WORDS = ["coffee", "game", "giants", "yankees", "music", "movie", "friends", "school", "city", "debate",
               "election", "vote", "campaign", "pizza", "weekend", "subway"]

PANIC_POSTS = [
    "OMG water coming into our street, so scared and afraid!!!",
    "We are TRAPPED on the second floor, please HELP us!!!",
    "This wind is terrifying, the kids are screaming and I am afraid",
    "So scared and terrified, the surge is flooding everything omg",
]
CALM_POSTS = [
    "Power came back this morning, making pancakes for the neighbors",
    "Quiet night here, just some branches down on the block",
    "Cleared the sidewalk with friends after the storm passed",
    "Grateful our building is fine, reading a book until the trains run again",
]
PANICKED_TWEETS = [
    "OMG the flood water is rising so fast, we are TRAPPED and scared!!! #Sandy",
    "Terrified of this wind, please help us #HurricaneSandy",
    "Can't stop shaking, the storm is a nightmare",
]
CALM_TWEETS = [
    "Cozy night in with candles while the rain passes #Sandy",
    "Checked on the neighbors, everyone is safe and dry",
    "Grateful for the crews restoring power across the city",
]

TRACK = [  # hours from landfall, latitude, longitude, wind km/h, pressure hPa, category
    (-72, 27.5, -77.1, 120, 960, "H1"),
    (-60, 29.0, -76.6, 120, 958, "H1"),
    (-48, 31.0, -75.9, 130, 956, "H1"),
    (-36, 32.9, -74.7, 130, 952, "H1"),
    (-24, 35.3, -73.2, 140, 946, "H1"),
    (-12, 37.5, -72.5, 150, 945, "H1"),
    (0, 39.4, -74.4, 130, 946, "ET"),
    (12, 39.9, -76.2, 95, 960, "ET"),
]

FIXTURE_PROBABILITIES = {"panic": 72, "calm": 30, MISSED_PANIC_USER: 45, FALSE_ALARM_USER: 80}


def _pre_text(rng: random.Random, user_index: int, previous: List[set]) -> str:
    """Seven distinct words, sharing at most three with any earlier post of the user."""
    weather_share = 5 if f"u{user_index:02d}" in PANIC_USERS else 2
    while True:
        words = rng.sample(WEATHER_WORDS, weather_share) + rng.sample(DAILY_WORDS, 7 - weather_share)
        bag = set(words)
        if all(len(bag & other) <= 3 for other in previous):
            previous.append(bag)
            rng.shuffle(words)
            return " ".join(words)


def _post_record(post_id: str, user_id: str, timestamp: int, text: str, geotagged: bool,
                 followers: int, followees: int) -> Dict[str, Any]:
    record = {"post_id": post_id, "user_id": user_id, "timestamp": timestamp, "text": text,
              "follower_count": followers, "followee_count": followees}
    if geotagged:
        record["latitude"] = 40.71
        record["longitude"] = -74.01
    return record


def build_posts(rng: random.Random) -> List[Dict[str, Any]]:
    posts = []
    for user_index in range(1, 28):
        user_id = f"u{user_index:02d}"
        geotagged = user_id in GEOTAGGED_USERS
        followers, followees = 50 + 7 * user_index, 30 + 3 * user_index
        pre_count = 6 if user_id == FEW_PRE_POSTS_USER else PRE_POSTS_PER_USER
        post_count = 0 if user_id == NO_POST_PHASE_USER else POST_POSTS_PER_USER
        bags: List[set] = []
        pre_texts = []
        for k in range(pre_count):
            timestamp = DISASTER_TIME - 10 * SECONDS_PER_DAY + k * int(0.75 * SECONDS_PER_DAY) + user_index * 60
            text = _pre_text(rng, user_index, bags)
            pre_texts.append(text)
            posts.append(_post_record(f"{user_id}-a{k:02d}", user_id, timestamp, text, geotagged,
                                      followers, followees))
        if user_id in DUPLICATE_POST_USERS:
            posts.append(_post_record(f"{user_id}-dup", user_id, DISASTER_TIME - SECONDS_PER_DAY + user_index,
                                      pre_texts[0], geotagged, followers, followees))
        if user_id in SHORT_POST_USERS:
            posts.append(_post_record(f"{user_id}-short", user_id, DISASTER_TIME - 2 * SECONDS_PER_DAY,
                                      "ok lol", geotagged, followers, followees))
        source = PANIC_POSTS if user_id in PANIC_USERS else CALM_POSTS
        for k in range(post_count):
            timestamp = DISASTER_TIME + (k + 1) * 3600 + user_index * 60
            posts.append(_post_record(f"{user_id}-b{k:02d}", user_id, timestamp,
                                      source[(user_index + k) % len(source)], geotagged, followers, followees))
    return posts


# --- Scripted replies ---

def _ppdts_reply(rng: random.Random, answered: int) -> str:
    lines = ["Answering as the user:"]
    for item in range(1, answered + 1):
        lines.append(f"{item}. **Q{item}: {rng.randint(1, 4)}** (consistent with the profile)")
    return "\n".join(lines)


def _arousal_reply(scores, probability=None) -> str:
    names = ("Awareness", "Coping", "Uncertainty", "Novelty")
    lines = [f"**{name}: {score}/5** (judged from the posting history);" for name, score in zip(names, scores)]
    if probability is not None:
        lines.append(f"Overall panic probability: **[{probability}%]**")
    return "\n".join(lines)


def _generation_reply(tweets: List[str], terminated: bool = True) -> str:
    body = "\n".join(f"[{tweet}]" for tweet in tweets)
    return body + ("\n### End" if terminated else "")


def _verdict_reply(failing: str = "") -> str:
    lines = []
    for label, expert in (("Psychological", "psychological"), ("Linguistic", "linguistic"),
                          ("Factual", "factual"), ("Panic", "emotional")):
        if expert == failing:
            lines.append(f"**{label}: NO** (does not match the {expert} evidence)")
        else:
            lines.append(f"**{label}: YES** (consistent)")
    return "\n".join(lines)


def _reply(text: str) -> Dict[str, str]:
    return {"reply": text}


def panicked_generation(user_id: str) -> bool:
    if user_id == MISSED_PANIC_USER:
        return False
    return user_id in PANIC_USERS or user_id == FALSE_ALARM_USER


def build_mock_script(rng: random.Random, posts: List[Dict[str, Any]]) -> Dict[str, Any]:
    sessions: Dict[str, List[Dict[str, str]]] = {}
    perception = _reply("I have read the disaster information and the profile, and I will answer as this user.")
    for user_id in RETAINED_USERS:
        if user_id == REFUSING_USER:
            sessions[user_id] = [{"refusal": "The request was blocked by the content policy."}]
            continue
        if user_id == INVALID_QUESTIONNAIRE_USER:
            sessions[user_id] = [perception, _reply(_ppdts_reply(rng, 17))]
            continue

        panicked = panicked_generation(user_id)
        if user_id in FIXTURE_PROBABILITIES:
            probability = FIXTURE_PROBABILITIES[user_id]
        else:
            probability = FIXTURE_PROBABILITIES["panic" if panicked else "calm"]
        scores = (4, 2, 4, 3) if panicked else (2, 4, 2, 2)
        tweets = PANICKED_TWEETS if panicked else CALM_TWEETS

        chain = [perception, _reply(_ppdts_reply(rng, 18))]
        if user_id == AROUSAL_RETRY_USER:
            chain.append(_reply(_arousal_reply((7, 2, 2, 2), probability)))
        chain.append(_reply(_arousal_reply((2, 2, 2, 2) if user_id == FALLBACK_USER else scores,
                                           None if user_id == FALLBACK_USER else probability)))
        if user_id == GENERATION_RETRY_USER:
            chain.append(_reply(_generation_reply(tweets, terminated=False)))
        attempts = 4 if user_id == UNVERIFIED_USER else (2 if user_id == REGENERATED_USER else 1)
        for attempt in range(1, attempts + 1):
            chain.append(_reply(_generation_reply(tweets)))
            if user_id == UNVERIFIED_USER or (user_id == REGENERATED_USER and attempt == 1):
                verdict = _verdict_reply("factual" if user_id == UNVERIFIED_USER else "linguistic")
            else:
                verdict = _verdict_reply()
            sessions[f"{user_id}/expert/{attempt}"] = [_reply(verdict)]
        sessions[user_id] = chain
        if user_id != FALLBACK_USER:
            sessions[f"{user_id}/tone"] = [_reply("direct, casual, warm" if not panicked else "anxious, urgent, emotional")]

    for post in posts:
        if post["post_id"].split("-")[-1].startswith("b"):
            panic = post["user_id"] in PANIC_USERS
            sessions[f"annotate/{post['post_id']}/relevance"] = [_reply("Yes. The post is about the hurricane.")]
            sessions[f"annotate/{post['post_id']}/panic"] = [
                _reply("Yes, the author sounds frightened." if panic else "No, the author sounds calm.")]
    return {"latencyMs": 0, "sessions": dict(sorted(sessions.items()))}


def build_config() -> Dict[str, Any]:
    return {
        "runMetadata": {"runName": "Synthetic fixture", "formatVersion": "1.0.0",
                        "creationDate": "2012-10-29T00:00:00+00:00", "author": "create_fixture_corpus"},
        "seed": FIXTURE_SEED,
        "outDir": "run_output",
        "corpus": {"postPaths": ["posts.jsonl"], "disasterContextPath": "track.csv",
                   "disasterTime": DISASTER_TIME, "eventName": EVENT_NAME, "labelsPath": "labels.jsonl"},
        "generation": {"tweetCount": 3},
        "provider": {"modelId": "fixture-model", "maxInFlight": 4},
        "topicModel": {"topicCount": 6, "keywordsPerTopic": 8, "iterations": 60, "inferenceIterations": 20},
        "simulate": {"partition": "all", "mockScriptPath": "mock_script.json"},
        "annotation": {"humanRoundsPath": "human_rounds.csv",
                       "eda": {"rates": {"synonym_replace": 0.1, "random_swap": 0.1}, "variantsPerInput": 2,
                               "seed": 7}},
    }


def _write_json(data: Any, filepath: str) -> None:
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")


def write_fixture(target_dir: str) -> str:
    """Writes every fixture file into `target_dir`; returns the config path."""
    os.makedirs(target_dir, exist_ok=True)
    rng = random.Random(FIXTURE_SEED)
    posts = build_posts(rng)

    with open(os.path.join(target_dir, "posts.jsonl"), 'w', encoding='utf-8', newline='\n') as f:
        for index, post in enumerate(posts):
            f.write(json.dumps(post, sort_keys=True) + "\n")
            if index in (40, 200):
                f.write(MALFORMED_LINES[0 if index == 40 else 1] + "\n")

    with open(os.path.join(target_dir, "track.csv"), 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["timestamp", "latitude", "longitude", "max_wind_kmh", "pressure_hpa", "category"])
        for hours, lat, lon, wind, pressure, category in TRACK:
            writer.writerow([DISASTER_TIME + hours * 3600, lat, lon, wind, pressure, category])

    with open(os.path.join(target_dir, "labels.jsonl"), 'w', encoding='utf-8', newline='\n') as f:
        for user_id in RETAINED_USERS + [FEW_PRE_POSTS_USER]:
            label = "Panic" if user_id in PANIC_USERS else "NoPanic"
            f.write(json.dumps({"userId": user_id, "label": label}) + "\n")

    with open(os.path.join(target_dir, "human_rounds.csv"), 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["post_id", "round", "label"])
        for user_id in HUMAN_ROUND_USERS:
            panic = user_id in PANIC_USERS
            for round_number in (1, 2, 3):
                agrees = round_number != 3
                writer.writerow([f"{user_id}-b00", round_number, "yes" if panic == agrees else "no"])

    _write_json(build_mock_script(rng, posts), os.path.join(target_dir, "mock_script.json"))
    config_path = os.path.join(target_dir, "config.json")
    _write_json(build_config(), config_path)
    logger.info("Fixture written successfully to %s (%d posts)", target_dir, len(posts))
    return config_path


def main():
    parser = argparse.ArgumentParser(description="Write the synthetic panic-forecast fixture.")
    parser.add_argument("target_dir", nargs="?", default="fixture")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    write_fixture(args.target_dir)


if __name__ == "__main__":
    main()
