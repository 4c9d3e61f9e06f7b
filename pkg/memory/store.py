"""Line-JSON memory snapshots, one line per agent."""

import os
from dataclasses import dataclass
from typing import Dict, Iterable

from domain.codec import dump_jsonl, from_dict, iter_jsonl, to_dict
from domain.types import EmotionalState, EpisodicRecord
from memory.emotional import EmotionalMemory
from memory.episodic import DEFAULT_WEIGHT, EpisodicMemory


@dataclass
class MemorySnapshot:
    agent_id: str
    episodic: EpisodicMemory
    emotional: EmotionalMemory


def snapshot_row(snapshot: MemorySnapshot) -> dict:
    return {
        "agent_id": snapshot.agent_id,
        "records": [to_dict(r) for r in snapshot.episodic.records],
        "emotion": to_dict(snapshot.emotional.state),
        "update_log": [[step, deltas] for step, deltas in snapshot.emotional.update_log],
    }


def save_snapshots(snapshots: Iterable[MemorySnapshot], path: str) -> int:
    return dump_jsonl([snapshot_row(s) for s in snapshots], path)


def load_snapshots(path: str, weight: float = DEFAULT_WEIGHT) -> Dict[str, MemorySnapshot]:
    if not os.path.exists(path):
        return {}
    out = {}
    for row in iter_jsonl(path):
        episodic = EpisodicMemory(row["agent_id"],
                                  (from_dict(EpisodicRecord, r) for r in row.get("records", [])),
                                  weight=weight)
        emotional = EmotionalMemory(from_dict(EmotionalState, row.get("emotion", {})))
        emotional.update_log = [(int(step), dict(deltas)) for step, deltas in row.get("update_log", [])]
        out[row["agent_id"]] = MemorySnapshot(row["agent_id"], episodic, emotional)
    return out
