"""Context vectors for an engagement: time, place, situation, goal and constraints."""

from typing import Optional

import numpy as np

from backend.base import CompletionBackend
from backend.parsing import parse_tagged_field
from domain.errors import FieldMissing
from domain.types import (MOODS, ConstraintContext, ContextVector, Persona, SituationalContext,
                          TemporalContext)
from env.render import format_time
from lifesim.schedule import (SLOT_MINUTES, SLOTS_PER_DAY, DailySchedule, load_library,
                              occupation_class)
from prompts.blocks import persona_block
from prompts.templates import GOAL

# happy, relaxed, neutral, bored, stressed, sad
_MOOD_BASE = np.array([0.25, 0.25, 0.2, 0.1, 0.1, 0.1])
_MOOD_SHIFT = np.array([-0.08, -0.07, 0.0, 0.0, 0.08, 0.07])


def mood_distribution(neuroticism: int) -> np.ndarray:
    """Higher neuroticism moves mass from happy/relaxed to stressed/sad."""
    level = (min(3, max(1, neuroticism)) - 1) / 2
    weights = _MOOD_BASE + level * _MOOD_SHIFT
    return weights / weights.sum()


def time_available(schedule: DailySchedule, slot_index: int) -> int:
    """Minutes from the engagement to the next non-leisure slot."""
    j = slot_index + 1
    while j < SLOTS_PER_DAY and schedule.slots[j].activity_class == "leisure":
        j += 1
    return SLOT_MINUTES * (j - slot_index)


def sample_budget(persona: Persona, rng: np.random.Generator, library: Optional[dict] = None) -> float:
    library = library or load_library()
    low, high = library["budget_ranges"][occupation_class(persona.occupation, library)]
    # conscientious spenders stay in the lower part of their range
    upper = low + (high - low) * (1.0 - 0.15 * (persona.traits.conscientiousness - 1))
    return round(float(rng.uniform(low, upper)), 2)


def goal_text(persona: Persona, schedule: DailySchedule, slot_index: int, mood: str,
              previous: str, seed: int, backend: CompletionBackend) -> str:
    slot = schedule.slots[slot_index]
    request = GOAL.request(seed=seed, persona=persona_block(persona),
                           time=format_time(slot.start_minute, schedule.day_of_week),
                           location=slot.location, activity_class=slot.activity_class,
                           activity=slot.activity, previous=previous, mood=mood)
    try:
        return parse_tagged_field(backend.complete(request).text, "GOAL")
    except FieldMissing:
        return f"find something to enjoy while {slot.activity}"


def build_context(schedule: DailySchedule, slot_index: int, persona: Persona, seed: int,
                  backend: CompletionBackend, library: Optional[dict] = None) -> ContextVector:
    """Context vector for an engagement at ``slot_index`` of ``schedule``."""
    slot = schedule.slots[slot_index]
    rng = np.random.default_rng(seed)
    previous = schedule.slots[slot_index - 1].activity if slot_index > 0 else slot.activity
    mood = MOODS[int(rng.choice(len(MOODS), p=mood_distribution(persona.traits.neuroticism)))]
    need = round(float(rng.uniform(0.0, 1.0)), 2)
    energy = round(float(rng.uniform(0.0, 1.0)), 2)
    budget = sample_budget(persona, rng, library)
    goal = goal_text(persona, schedule, slot_index, mood, previous, seed, backend)
    return ContextVector(
        c_t=TemporalContext(minute_of_day=slot.start_minute, day_of_week=schedule.day_of_week),
        c_l=slot.location,
        c_s=SituationalContext(latest_activity=previous, mood=mood, need_level=need,
                               energy_level=energy),
        c_g=goal,
        c_b=ConstraintContext(budget=budget, time_available_minutes=time_available(schedule, slot_index)),
    )


def minimal_context(day_index: int, slot_index: int) -> ContextVector:
    """Context carrying only the engagement time; other factors are neutral placeholders."""
    return ContextVector(
        c_t=TemporalContext(minute_of_day=SLOT_MINUTES * slot_index, day_of_week=day_index % 7),
        c_l="unknown",
        c_s=SituationalContext(latest_activity="unknown", mood="neutral", need_level=0.5,
                               energy_level=0.5),
        c_g="browse recommendations",
        c_b=ConstraintContext(budget=None, time_available_minutes=SLOT_MINUTES),
    )
