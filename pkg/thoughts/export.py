"""Corpus export/import and its sidecar manifest."""

import json
import os
from typing import Dict, Iterable, List, Optional

from domain.codec import dump_jsonl, from_dict, iter_jsonl, to_dict
from domain.errors import IOFailure
from thoughts.records import TASKS, ThoughtInputs, ThoughtRecord

# Fine-tuning setup the corpora are meant for; recorded, never executed here.
TRAINING_METADATA = {
    "objective": "joint next-token loss over ID and TA rationales",
    "epochs": 5,
    "batch_size": 16,
    "learning_rate": 1e-5,
    "optimizer": "AdamW",
    "max_length": 4096,
    "lora": {"rank": 8, "alpha": 16, "target_modules": "all-linear"},
}


def record_row(record: ThoughtRecord) -> dict:
    return {"task": record.task, "agent_id": record.agent_id,
            "inputs": to_dict(record.inputs), "target": record.target_rationale}


def record_from_row(row: dict) -> ThoughtRecord:
    return ThoughtRecord(task=row["task"], agent_id=row["agent_id"],
                         inputs=from_dict(ThoughtInputs, row["inputs"]), target_rationale=row["target"])


def manifest_for(records: List[ThoughtRecord], reconstructed: bool = False,
                 seed: Optional[int] = None) -> dict:
    per_task = {task: 0 for task in TASKS}
    per_user: Dict[str, Dict[str, int]] = {}
    for r in records:
        per_task[r.task] = per_task.get(r.task, 0) + 1
        user = per_user.setdefault(r.agent_id, {task: 0 for task in TASKS})
        user[r.task] = user.get(r.task, 0) + 1
    return {"total": len(records), "per_task": per_task, "per_user": per_user,
            "ta_sources_reconstructed": reconstructed, "seed": seed,
            "training": TRAINING_METADATA}


def export_jsonl(records: Iterable[ThoughtRecord], path: str, manifest_path: Optional[str] = None,
                 reconstructed: bool = False, seed: Optional[int] = None) -> int:
    """
    Write one ``{task, agent_id, inputs, target}`` object per line plus a manifest.

    Returns:
        number of records written

    Raises:
        IOFailure: the corpus or manifest cannot be written
    """
    records = list(records)
    for r in records:
        problems = r.problems()
        if problems:
            raise ValueError(f"invalid record for {r.agent_id}: {', '.join(problems)}")
    count = dump_jsonl((record_row(r) for r in records), path)
    manifest_path = manifest_path or os.path.splitext(path)[0] + ".manifest.json"
    try:
        with open(manifest_path, "w", encoding="utf-8") as f:
            json.dump(manifest_for(records, reconstructed, seed), f, indent=2, sort_keys=True)
    except OSError as e:
        raise IOFailure(f"cannot write {manifest_path}: {e}") from e
    return count


def load_records(path: str) -> List[ThoughtRecord]:
    return [record_from_row(row) for row in iter_jsonl(path)]
