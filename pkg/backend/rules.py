"""Deterministic rules behind the scripted backend.

The agent reuses the internal-state rule as its fallback when a model
reply cannot be parsed, so both paths stay identical.
"""

import hashlib
import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

_TOKEN = re.compile(r"[a-z0-9'\-]+")

WATCH_THRESHOLD = 0.34
DILUTION = 0.6


@dataclass(frozen=True)
class ItemRow:
    """One item as listed in a prompt block: ``id | title | label; label``."""
    item_id: str
    title: str
    labels: Tuple[str, ...]


def tokens(text: str) -> Set[str]:
    return set(_TOKEN.findall((text or "").lower()))


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def clamp(value: float, low: float = 0.0, high: float = 1.0) -> float:
    return max(low, min(high, value))


def stable_int(*parts) -> int:
    """Platform-independent hash of ``parts``."""
    tag = "|".join(str(p) for p in parts)
    return int(hashlib.sha256(tag.encode("utf-8")).hexdigest()[:12], 16)


def label_matches(label: str, preference_tokens: Set[str]) -> bool:
    label_tokens = tokens(label)
    return bool(label_tokens) and label_tokens <= preference_tokens


def matched_labels(labels: Sequence[str], preferences: str) -> List[str]:
    pref = tokens(preferences)
    return [label for label in labels if label_matches(label, pref)]


def overlap_fraction(labels: Sequence[str], preferences: str) -> float:
    if not labels:
        return 0.0
    return len(matched_labels(labels, preferences)) / len(labels)


def rating_rule(overlap: float) -> int:
    """1 + round(4 * overlap), always within 1..5."""
    return max(1, min(5, 1 + round_half_up(4 * overlap)))


def appraise_rule(overlap: float) -> str:
    return "WATCH" if overlap >= WATCH_THRESHOLD else "SKIP"


def recall_bar(overlaps: Sequence[float]) -> float:
    """Overlap an item needs to be claimed as seen; rises with the share of unfamiliar candidates."""
    if not overlaps:
        return WATCH_THRESHOLD
    unfamiliar = sum(1 for o in overlaps if o < WATCH_THRESHOLD) / len(overlaps)
    return WATCH_THRESHOLD + DILUTION * unfamiliar


def interview_rule(satisfaction: float) -> int:
    return max(1, min(10, round_half_up(1 + 9 * clamp(satisfaction))))


def internal_state_rule(start_fatigue: float, start_boredom: float, steps_taken: int,
                        zero_watch_streak: int, openness: int, novelty: float,
                        fatigue_step: float = 0.05, boredom_step: float = 0.15
                        ) -> Tuple[float, float, float]:
    """
    Scripted fatigue, curiosity and boredom.

    Returns:
        (fatigue, curiosity, boredom), each clamped to [0, 1]
    """
    fatigue = clamp(start_fatigue + fatigue_step * steps_taken)
    boredom = clamp(start_boredom + boredom_step * zero_watch_streak)
    openness_normalized = (min(3, max(1, openness)) - 1) / 2
    curiosity = clamp(0.2 + 0.2 * openness_normalized + 0.3 * clamp(novelty))
    return fatigue, curiosity, boredom


def format_item_row(item_id: str, title: str, labels: Iterable[str]) -> str:
    return f"{item_id} | {title} | {'; '.join(labels)}"


def parse_item_row(line: str) -> Optional[ItemRow]:
    parts = [p.strip() for p in line.split(" | ")]
    if len(parts) < 2:
        return None
    item_id = parts[0]
    if len(parts) == 2:
        return ItemRow(item_id, parts[1], ())
    title = " | ".join(parts[1:-1])
    labels = tuple(l.strip() for l in parts[-1].split(";") if l.strip())
    return ItemRow(item_id, title, labels)


def top_labels(rows: Sequence[ItemRow], start: int = 0, count: int = 3) -> List[str]:
    """Labels ranked by frequency (ties alphabetical), window ``[start, start+count)``."""
    counts = {}
    for row in rows:
        for label in row.labels:
            counts[label] = counts.get(label, 0) + 1
    ranked = sorted(counts, key=lambda l: (-counts[l], l))
    if not ranked:
        return []
    start = start % len(ranked)
    window = ranked[start:start + count]
    if len(window) < count and len(ranked) > len(window):
        window += [l for l in ranked if l not in window][:count - len(window)]
    return window
