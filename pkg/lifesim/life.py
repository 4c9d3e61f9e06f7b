"""Multi-day life simulation for one agent."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from backend.base import CompletionBackend
from domain.types import ContextVector, EmotionalState, Persona
from lifesim.context import build_context, minimal_context
from lifesim.engagement import (Engagement, day_engagements, pick_sessions,
                                uniform_engagements)
from lifesim.schedule import DailySchedule, day_type_of, generate_schedule, sample_externals
from settings import derive_seed


@dataclass
class LifeLog:
    """Schedules lived, engagement moments drawn and the contexts built for them."""
    agent_id: str
    schedules: List[DailySchedule] = field(default_factory=list)
    engagements: List[Engagement] = field(default_factory=list)
    contexts: Dict[Tuple[int, int], ContextVector] = field(default_factory=dict)

    def context_of(self, engagement: Engagement) -> ContextVector:
        return self.contexts[(engagement.day_index, engagement.slot_index)]


def live_days(persona: Persona, horizon_days: int, root_seed: int, backend: CompletionBackend,
              emotional: Optional[EmotionalState] = None,
              base: Optional[Dict[str, float]] = None,
              habit_multiplier: Optional[Dict[str, float]] = None,
              library: Optional[dict] = None) -> LifeLog:
    """Generate ``horizon_days`` schedules and a context for every engagement drawn."""
    emotional = emotional or EmotionalState()
    log = LifeLog(persona.agent_id)
    previous = None
    for day in range(horizon_days):
        day_seed = derive_seed(root_seed, "day", persona.agent_id, day)
        externals = sample_externals(day, derive_seed(day_seed, "externals"), library)
        schedule = generate_schedule(persona, day, day_type_of(day), externals,
                                     derive_seed(day_seed, "schedule"), backend, previous, library)
        log.schedules.append(schedule)
        for engagement in day_engagements(schedule, persona, emotional,
                                          derive_seed(day_seed, "engagement"), base, habit_multiplier):
            log.engagements.append(engagement)
            log.contexts[(day, engagement.slot_index)] = build_context(
                schedule, engagement.slot_index, persona,
                derive_seed(day_seed, "context", engagement.slot_index), backend, library)
        previous = schedule
    return log


def session_engagements(log: LifeLog, count: int, root_seed: int) -> List[Engagement]:
    return pick_sessions(log.engagements, count, derive_seed(root_seed, "sessions", log.agent_id))


def uniform_sessions(agent_id: str, count: int, horizon_days: int,
                     root_seed: int) -> List[Tuple[Engagement, ContextVector]]:
    """Sessions at uniform times with time-only contexts, used without life simulation."""
    picked = uniform_engagements(count, horizon_days, derive_seed(root_seed, "uniform", agent_id))
    return [(e, minimal_context(e.day_index, e.slot_index)) for e in picked]
