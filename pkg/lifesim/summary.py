"""Multi-day context summary appended to a persona for the summary variant."""

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from backend.base import CompletionBackend
from backend.parsing import parse_tagged_field
from domain.errors import EmptyHorizon, FieldMissing
from domain.types import ContextVector, Persona
from prompts.blocks import persona_block
from prompts.templates import SUMMARIZE

BANDS = ("Morning", "Afternoon", "Evening", "Night")


def band_of(hour: int) -> str:
    """Morning [6,12), Afternoon [12,18), Evening [18,24), Night [0,6)."""
    if 6 <= hour < 12:
        return "Morning"
    if 12 <= hour < 18:
        return "Afternoon"
    if 18 <= hour < 24:
        return "Evening"
    return "Night"


@dataclass(frozen=True)
class ContextSummary:
    agent_id: str
    horizon_days: int
    summary_text: str
    band_frequencies: Tuple[float, float, float, float]
    top_locations: Tuple[str, ...] = ()
    top_goals: Tuple[str, ...] = ()
    median_budget: Optional[float] = None
    engagements: int = 0


def band_frequencies(contexts: Sequence[ContextVector]) -> Tuple[float, ...]:
    counts = Counter(band_of(c.c_t.hour) for c in contexts)
    total = sum(counts.values())
    return tuple(counts[b] / total if total else 0.0 for b in BANDS)


def _top(values: Sequence[str], n: int = 3) -> Tuple[str, ...]:
    counts = Counter(v for v in values if v)
    return tuple(sorted(counts, key=lambda v: (-counts[v], v))[:n])


def summarize_contexts(contexts: Sequence[ContextVector], persona: Persona,
                       backend: CompletionBackend, horizon_days: int = 30,
                       seed: Optional[int] = None) -> ContextSummary:
    """
    Aggregate the engagements of ``horizon_days`` and have the backend phrase them.

    Raises:
        EmptyHorizon: no contexts were observed
    """
    if not contexts:
        raise EmptyHorizon(f"no engagements for {persona.agent_id}")
    if horizon_days < 1:
        raise ValueError("horizon_days must be >= 1")
    bands = band_frequencies(contexts)
    locations = _top([c.c_l for c in contexts])
    goals = _top([c.c_g for c in contexts])
    budgets = [c.c_b.budget for c in contexts if c.c_b.budget is not None]
    median = float(np.median(budgets)) if budgets else None

    request = SUMMARIZE.request(
        seed=seed, persona=persona_block(persona), days=horizon_days, count=len(contexts),
        bands=", ".join(f"{b}={f:.2f}" for b, f in zip(BANDS, bands)),
        locations=", ".join(locations) or "none", goals="; ".join(goals) or "none",
        budget="n/a" if median is None else f"{median:.2f}")
    try:
        text = parse_tagged_field(backend.complete(request).text, "SUMMARY")
    except FieldMissing:
        text = ""
    if not text:
        dominant = BANDS[int(np.argmax(bands))]
        text = f"Over the last {horizon_days} days I mostly used recommendations in the {dominant}."
    return ContextSummary(agent_id=persona.agent_id, horizon_days=horizon_days, summary_text=text,
                          band_frequencies=bands, top_locations=locations, top_goals=goals,
                          median_budget=median, engagements=len(contexts))
