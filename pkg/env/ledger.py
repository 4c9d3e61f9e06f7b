"""Shared exposure/like counters for multi-round experiments.

Rounds are barrier-synchronized by the caller: every agent finishes round r
before ``close_round`` runs, and readers only see closed-round totals, so
the order in which concurrent agents record events does not matter.
"""

import threading
from typing import Dict, Iterable, List


class InteractionLedger:
    """Cumulative per-item exposure and like counts with per-round snapshots."""

    def __init__(self):
        self._lock = threading.Lock()
        self.exposures: Dict[str, int] = {}
        self.likes: Dict[str, int] = {}
        self._round_exposures: Dict[str, int] = {}
        self._round_likes: Dict[str, int] = {}
        self.snapshots: List[Dict[str, Dict[str, int]]] = []
        self.increments: List[Dict[str, Dict[str, int]]] = []

    @property
    def current_round(self) -> int:
        """1-based index of the round being recorded."""
        return len(self.snapshots) + 1

    def record_exposure(self, item_ids: Iterable[str]):
        with self._lock:
            for item_id in item_ids:
                self._round_exposures[item_id] = self._round_exposures.get(item_id, 0) + 1

    def record_like(self, item_id: str, count: int = 1):
        if count < 0:
            raise ValueError("like increments must be non-negative")
        with self._lock:
            self._round_likes[item_id] = self._round_likes.get(item_id, 0) + count

    def close_round(self) -> Dict[str, Dict[str, int]]:
        """Fold the open round into the cumulative totals and snapshot them."""
        with self._lock:
            for item_id, n in self._round_exposures.items():
                self.exposures[item_id] = self.exposures.get(item_id, 0) + n
            for item_id, n in self._round_likes.items():
                self.likes[item_id] = self.likes.get(item_id, 0) + n
            self.increments.append({"exposures": dict(self._round_exposures),
                                    "likes": dict(self._round_likes)})
            self._round_exposures = {}
            self._round_likes = {}
            snapshot = {"exposures": dict(self.exposures), "likes": dict(self.likes)}
            self.snapshots.append(snapshot)
            return snapshot

    def closed_likes(self, item_id: str) -> int:
        """Likes as of the last closed round."""
        with self._lock:
            return self.likes.get(item_id, 0)

    def like_curve(self, item_id: str) -> List[int]:
        """Cumulative likes of ``item_id`` after each closed round."""
        return [s["likes"].get(item_id, 0) for s in self.snapshots]

    def to_dict(self) -> Dict:
        with self._lock:
            return {"rounds": len(self.snapshots), "exposures": dict(self.exposures),
                    "likes": dict(self.likes), "increments": list(self.increments)}
