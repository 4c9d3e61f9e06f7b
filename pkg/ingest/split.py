"""Activity filtering and the time-ordered train/validation/test split."""

import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from domain.codec import dump_jsonl, load_jsonl
from domain.types import InteractionRecord, id_sort_key


@dataclass
class Split:
    train: List[InteractionRecord] = field(default_factory=list)
    validation: List[InteractionRecord] = field(default_factory=list)
    test: List[InteractionRecord] = field(default_factory=list)

    def sizes(self):
        return len(self.train), len(self.validation), len(self.test)


def filter_min_interactions(records: Sequence[InteractionRecord], k: int) -> List[InteractionRecord]:
    """Drop users and items with fewer than ``k`` interactions, repeated to a fixpoint."""
    if k < 0:
        raise ValueError("k must be >= 0")
    current = list(records)
    while True:
        users: Dict[str, int] = {}
        items: Dict[str, int] = {}
        for r in current:
            users[r.user_id] = users.get(r.user_id, 0) + 1
            items[r.item_id] = items.get(r.item_id, 0) + 1
        kept = [r for r in current if users[r.user_id] >= k and items[r.item_id] >= k]
        if len(kept) == len(current):
            return kept
        current = kept


def _order(r: InteractionRecord):
    return (r.timestamp, id_sort_key(r.user_id), id_sort_key(r.item_id))


def temporal_split(records: Sequence[InteractionRecord], train: float = 0.8,
                   validation: float = 0.1, test: float = 0.1) -> Split:
    """
    Sort by time (ties by user then item) and cut into three consecutive parts.

    Sizes are floor(train*n), floor(validation*n) and the remainder.
    """
    if abs(train + validation + test - 1.0) > 1e-9:
        raise ValueError("split fractions must sum to 1")
    ordered = sorted(records, key=_order)
    n = len(ordered)
    n_train = int(math.floor(train * n + 1e-9))
    n_val = int(math.floor(validation * n + 1e-9))
    return Split(train=ordered[:n_train], validation=ordered[n_train:n_train + n_val],
                 test=ordered[n_train + n_val:])


def _ts_range(records: List[InteractionRecord]):
    if not records:
        return None
    return [records[0].timestamp, records[-1].timestamp]


def split_stats(split: Split) -> dict:
    every = split.train + split.validation + split.test
    return {
        "counts": {"train": len(split.train), "validation": len(split.validation),
                   "test": len(split.test), "total": len(every)},
        "timestamp_ranges": {"train": _ts_range(split.train),
                             "validation": _ts_range(split.validation),
                             "test": _ts_range(split.test)},
        "users": len({r.user_id for r in every}),
        "items": len({r.item_id for r in every}),
    }


def write_split(split: Split, out_dir: str) -> dict:
    """Write ``split/{train,validation,test}.jsonl`` and ``stats.json``; returns the stats."""
    split_dir = os.path.join(out_dir, "split")
    for name in ("train", "validation", "test"):
        dump_jsonl(getattr(split, name), os.path.join(split_dir, f"{name}.jsonl"))
    stats = split_stats(split)
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8") as f:
        json.dump(stats, f, indent=2, sort_keys=True)
    return stats


def read_split(out_dir: str) -> Split:
    split_dir = os.path.join(out_dir, "split")
    return Split(*(load_jsonl(InteractionRecord, os.path.join(split_dir, f"{name}.jsonl"))
                   for name in ("train", "validation", "test")))


def by_user(records: Sequence[InteractionRecord]) -> Dict[str, List[InteractionRecord]]:
    """Group records per user, each list in time order."""
    groups: Dict[str, List[InteractionRecord]] = {}
    for r in sorted(records, key=_order):
        groups.setdefault(r.user_id, []).append(r)
    return groups
