"""Value types shared by every simulator package.

All types are frozen dataclasses so they can be handed between worker
threads without copying.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from domain.actions import Action

TRAITS = ("openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism")
MOODS = ("happy", "relaxed", "neutral", "bored", "stressed", "sad")
LOCATIONS = ("home", "office", "campus", "transit", "restaurant", "outdoors", "shop")
INTERACTION_KINDS = ("view", "rate", "click", "purchase")
MODES = ("recommendation", "webshop")
HABIT_LEVELS = ("low", "medium", "high")
HABIT_NAMES = ("engagement", "conformity", "variety")
FACTORS = ("c_t", "c_l", "c_s", "c_g", "c_b")
DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


@dataclass(frozen=True)
class BigFive:
    openness: int = 2
    conscientiousness: int = 2
    extraversion: int = 2
    agreeableness: int = 2
    neuroticism: int = 2

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.openness, self.conscientiousness, self.extraversion,
                self.agreeableness, self.neuroticism)


@dataclass(frozen=True)
class Persona:
    """Stable identity of a simulated user."""
    agent_id: str
    age: int
    occupation: str
    traits: BigFive
    habits: Tuple[str, ...]
    recent_goals: Tuple[str, ...]
    preferences: str
    context_summary: Optional[str] = None

    def habit_level(self, name: str) -> str:
        """Return the level of a habit stored as ``"<name>=<level>"``."""
        for habit in self.habits:
            key, _, level = habit.partition("=")
            if key.strip().lower() == name:
                return level.strip().lower() or "medium"
        return "medium"

    def with_summary(self, summary: Optional[str]) -> "Persona":
        return replace(self, context_summary=summary)


@dataclass(frozen=True)
class TemporalContext:
    minute_of_day: int
    day_of_week: int

    @property
    def hour(self) -> int:
        return self.minute_of_day // 60


@dataclass(frozen=True)
class SituationalContext:
    latest_activity: str
    mood: str
    need_level: float
    energy_level: float


@dataclass(frozen=True)
class ConstraintContext:
    budget: Optional[float]
    time_available_minutes: int


@dataclass(frozen=True)
class ContextVector:
    """The five contextual factors attached to one engagement."""
    c_t: TemporalContext
    c_l: str
    c_s: SituationalContext
    c_g: str
    c_b: ConstraintContext


@dataclass(frozen=True)
class Item:
    item_id: str
    title: str
    description: str = ""
    categories: Tuple[str, ...] = ()
    brand: Optional[str] = None
    price: Optional[float] = None
    stat_count: int = 0
    stat_mean_rating: Optional[float] = None

    def labels(self) -> Tuple[str, ...]:
        """Categories plus the brand, the keywords preference matching runs on."""
        if self.brand:
            return self.categories + (self.brand,)
        return self.categories


@dataclass(frozen=True)
class InteractionRecord:
    user_id: str
    item_id: str
    rating: Optional[int]
    timestamp: int
    kind: str = "rate"


@dataclass(frozen=True)
class SessionState:
    """What the agent sees at one step of a session."""
    mode: str
    page_number: int
    items: Tuple[Item, ...]
    page_context: str = ""
    user_context: Optional[ContextVector] = None
    expanded_item: Optional[str] = None
    interactive_elements: Tuple[str, ...] = ()
    terminated: bool = False
    query: Optional[str] = None
    cart: Tuple[str, ...] = ()
    own_ratings: Dict[str, int] = field(default_factory=dict, compare=False)

    def item_ids(self) -> Tuple[str, ...]:
        return tuple(item.item_id for item in self.items)

    def find(self, item_id: str) -> Optional[Item]:
        for item in self.items:
            if item.item_id == item_id:
                return item
        return None


@dataclass(frozen=True)
class TrajectoryStep:
    state_digest: str
    thought: str
    action: Action
    page_number: int = 1


@dataclass(frozen=True)
class Trajectory:
    agent_id: str
    session_id: str
    context: Optional[ContextVector]
    steps: Tuple[TrajectoryStep, ...]
    terminal_action: Action
    forced_exit: bool = False
    complete: bool = True
    strategy: str = ""
    mode: str = "recommendation"


@dataclass(frozen=True)
class EmotionalState:
    fatigue: float = 0.0
    satisfaction: float = 0.5
    curiosity: float = 0.5
    boredom: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return {"fatigue": self.fatigue, "satisfaction": self.satisfaction,
                "curiosity": self.curiosity, "boredom": self.boredom}

    def shifted(self, deltas: Dict[str, float]) -> "EmotionalState":
        """Apply per-coordinate deltas, clamping every coordinate to [0, 1]."""
        values = self.as_dict()
        for name, delta in deltas.items():
            if name not in values:
                raise KeyError(f"unknown emotion coordinate: {name}")
            values[name] = clamp(values[name] + float(delta))
        return EmotionalState(**values)


def clamp(value: float, low: float = 0.0, high: float = 1.0) -> float:
    if value != value:  # NaN
        return low
    return max(low, min(high, value))


EPISODE_KINDS = ("view", "rate", "click", "reflection", "preference")


@dataclass(frozen=True)
class EpisodicRecord:
    step_index: int
    kind: str
    text: str
    item_id: Optional[str] = None


def id_sort_key(identifier: str):
    """Numeric ids sort by value and before non-numeric ones."""
    text = str(identifier)
    return (0, int(text), "") if text.isdigit() else (1, 0, text)
