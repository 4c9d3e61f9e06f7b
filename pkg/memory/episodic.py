"""Episodic memory: an append-only, step-ordered record list with lexical retrieval."""

from typing import Dict, Iterable, List, Optional, Sequence

from backend.rules import tokens
from domain.errors import OrderViolation
from domain.types import EpisodicRecord, InteractionRecord, Item

DEFAULT_WEIGHT = 0.7


def describe_interaction(record: InteractionRecord, item: Optional[Item]) -> str:
    title = item.title if item else f"item {record.item_id}"
    labels = "; ".join(item.labels()) if item and item.labels() else "unlabelled"
    if record.rating is not None:
        return f"rated {title} ({labels}) {record.rating}/5"
    return f"viewed {title} ({labels})"


def initial_records(history: Sequence[InteractionRecord], catalog: Dict[str, Item]) -> List[EpisodicRecord]:
    """One ``view`` or ``rate`` record per training interaction, in history order."""
    out = []
    for step, record in enumerate(history):
        out.append(EpisodicRecord(step_index=step,
                                  kind="rate" if record.rating is not None else "view",
                                  text=describe_interaction(record, catalog.get(record.item_id)),
                                  item_id=record.item_id))
    return out


class EpisodicMemory:
    """Interactions and reflections of one agent, ordered by step index."""

    def __init__(self, owner: str, records: Iterable[EpisodicRecord] = (),
                 weight: float = DEFAULT_WEIGHT):
        self.owner = owner
        self.weight = weight
        self.records: List[EpisodicRecord] = []
        for record in records:
            self.append(record)

    def __len__(self):
        return len(self.records)

    def __repr__(self):
        return f"<EpisodicMemory(owner='{self.owner}', records={len(self.records)})>"

    @property
    def last_step(self) -> int:
        return self.records[-1].step_index if self.records else -1

    def next_step(self) -> int:
        return self.last_step + 1

    def append(self, record: EpisodicRecord) -> "EpisodicMemory":
        if record.step_index < self.last_step:
            raise OrderViolation(f"step {record.step_index} appended after step {self.last_step}")
        if not record.text.strip():
            raise ValueError("episodic record text must be non-empty")
        self.records.append(record)
        return self

    def item_ids(self) -> List[str]:
        seen = []
        for record in self.records:
            if record.item_id and record.item_id not in seen:
                seen.append(record.item_id)
        return seen

    def score(self, query_tokens: set, record: EpisodicRecord, max_step: int) -> float:
        overlap = len(query_tokens & tokens(record.text)) / len(query_tokens) if query_tokens else 0.0
        recency = (1 + record.step_index) / (1 + max_step)
        return self.weight * overlap + (1 - self.weight) * recency

    def retrieve(self, query: str, k: int) -> List[EpisodicRecord]:
        """
        Top-``k`` records by weighted token overlap and recency.

        Ties go to the more recent record, then to the later position.
        """
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0 or not self.records:
            return []
        query_tokens = tokens(query)
        max_step = max(r.step_index for r in self.records)
        scored = [(self.score(query_tokens, r, max_step), r.step_index, pos, r)
                  for pos, r in enumerate(self.records)]
        scored.sort(key=lambda t: (-t[0], -t[1], -t[2]))
        return [t[3] for t in scored[:k]]
