"""Reusable prompt fragments: persona, item rows, evidence and context lines."""

from typing import Dict, Iterable, Optional, Sequence

from backend.rules import format_item_row
from domain.types import FACTORS, ContextVector, EpisodicRecord, InteractionRecord, Item, Persona
from env.render import format_context

NONE = "none"


def persona_block(persona: Persona) -> str:
    t = persona.traits
    lines = [
        "PERSONA:",
        f"AGE: {persona.age}",
        f"OCCUPATION: {persona.occupation}",
        f"TRAITS: O={t.openness}, C={t.conscientiousness}, E={t.extraversion}, "
        f"A={t.agreeableness}, N={t.neuroticism}",
        f"HABITS: {', '.join(persona.habits) or NONE}",
        f"GOALS: {'; '.join(persona.recent_goals) or NONE}",
        f"PREFERENCES: {persona.preferences}",
    ]
    if persona.context_summary:
        lines.append(f"CONTEXT_SUMMARY: {persona.context_summary}")
    return "\n".join(lines)


def item_row(item: Item) -> str:
    return format_item_row(item.item_id, item.title, item.labels())


def item_rows(items: Iterable[Item]) -> str:
    rows = [f"- {item_row(item)}" for item in items]
    return "\n".join(rows) if rows else f"- {NONE}"


def history_rows(history: Sequence[InteractionRecord], catalog: Dict[str, Item]) -> str:
    """One ``- id | title [rated r/5] | labels`` line per interaction."""
    rows = []
    for record in history:
        item = catalog.get(record.item_id)
        rating = "unrated" if record.rating is None else f"rated {record.rating}/5"
        title = f"{item.title if item else record.item_id} [{rating}]"
        rows.append(f"- {format_item_row(record.item_id, title, item.labels() if item else ())}")
    return "\n".join(rows) if rows else f"- {NONE}"


def evidence_rows(records: Sequence[EpisodicRecord]) -> str:
    rows = [f"- [step {r.step_index}] {r.text}" for r in records]
    return "\n".join(rows) if rows else f"- {NONE}"


def context_line(context: Optional[ContextVector], mask: Iterable[str] = FACTORS) -> str:
    """``CONTEXT: ...`` plus a newline, or the empty string when nothing is unmasked."""
    text = format_context(context, mask)
    return f"CONTEXT: {text}\n" if text else ""


def id_list(ids: Iterable[str]) -> str:
    ids = list(ids)
    return ", ".join(ids) if ids else NONE
