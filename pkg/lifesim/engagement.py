"""When a simulated person opens the recommender."""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from domain.types import EmotionalState, Persona, clamp
from lifesim.schedule import SLOTS_PER_DAY, DailySchedule, ScheduleSlot

BASE_ENGAGEMENT = {"sleep": 0.0, "work": 0.05, "commute": 0.2, "meal": 0.15,
                   "chores": 0.05, "rest": 0.25, "social": 0.1, "leisure": 0.3}
HABIT_MULTIPLIER = {"low": 0.5, "medium": 1.0, "high": 1.5}


@dataclass(frozen=True)
class Engagement:
    day_index: int
    slot_index: int


def engagement_probability(slot: ScheduleSlot, persona: Persona, emotional: EmotionalState,
                           base: Optional[Dict[str, float]] = None,
                           habit_multiplier: Optional[Dict[str, float]] = None) -> float:
    """base(activity class) x habit multiplier x (1 - 0.5 fatigue), clamped to [0, 1]."""
    base = base or BASE_ENGAGEMENT
    habit_multiplier = habit_multiplier or HABIT_MULTIPLIER
    p = (base.get(slot.activity_class, 0.0)
         * habit_multiplier.get(persona.habit_level("engagement"), 1.0)
         * (1 - 0.5 * clamp(emotional.fatigue)))
    return clamp(p)


def day_engagements(schedule: DailySchedule, persona: Persona, emotional: EmotionalState,
                    seed: int, base: Optional[Dict[str, float]] = None,
                    habit_multiplier: Optional[Dict[str, float]] = None) -> List[Engagement]:
    """One Bernoulli draw per slot."""
    rng = np.random.default_rng(seed)
    draws = rng.random(SLOTS_PER_DAY)
    return [Engagement(schedule.day_index, slot.index) for slot in schedule.slots
            if draws[slot.index] < engagement_probability(slot, persona, emotional, base,
                                                          habit_multiplier)]


def pick_sessions(engagements: List[Engagement], count: int, seed: int) -> List[Engagement]:
    """Up to ``count`` engagements drawn without replacement, in time order."""
    if count >= len(engagements):
        return list(engagements)
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(engagements), size=count, replace=False).tolist())
    return [engagements[i] for i in chosen]


def uniform_engagements(count: int, horizon_days: int, seed: int) -> List[Engagement]:
    """Engagement times with no life simulation: uniform over days and slots."""
    rng = np.random.default_rng(seed)
    days = rng.integers(0, max(1, horizon_days), size=count)
    slots = rng.integers(0, SLOTS_PER_DAY, size=count)
    picked = sorted(zip(days.tolist(), slots.tolist()))
    return [Engagement(int(d), int(s)) for d, s in picked]
