"""Invariant checks for domain values.

``validate`` never raises: it returns the list of violated invariants, each
tagged with the field path it concerns. An empty list means the value is ok.
"""

from dataclasses import dataclass
from functools import singledispatch
from typing import List, Optional

from domain.actions import WEB_ONLY, ClickItem, Rate, Search, WebClick, WebInput, is_terminal
from domain.types import (EPISODE_KINDS, INTERACTION_KINDS, MODES, MOODS, TRAITS, BigFive,
                          ContextVector, EmotionalState, EpisodicRecord, InteractionRecord,
                          Item, Persona, SessionState, Trajectory)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def _in_unit(value: float) -> bool:
    return value == value and 0.0 <= value <= 1.0


def _join(prefix: str, path: str) -> str:
    return f"{prefix}.{path}" if prefix else path


@singledispatch
def validate(value, path: str = "") -> List[Violation]:
    """Return every violated invariant of ``value``."""
    return []


@validate.register
def _(value: BigFive, path: str = "") -> List[Violation]:
    out = []
    for name in TRAITS:
        trait = getattr(value, name)
        if not isinstance(trait, int) or trait not in (1, 2, 3):
            out.append(Violation(_join(path, name), f"{name} ∉ 1..3"))
    return out


@validate.register
def _(value: Persona, path: str = "") -> List[Violation]:
    out = []
    if not 13 <= value.age <= 100:
        out.append(Violation(_join(path, "age"), "age ∉ [13,100]"))
    if not value.preferences.strip():
        out.append(Violation(_join(path, "preferences"), "preferences empty"))
    if len(value.habits) < 1:
        out.append(Violation(_join(path, "habits"), "habits empty"))
    out.extend(validate(value.traits, _join(path, "traits")))
    return out


@validate.register
def _(value: ContextVector, path: str = "", engaged: bool = True) -> List[Violation]:
    out = []
    if not 0 <= value.c_t.minute_of_day <= 1439:
        out.append(Violation(_join(path, "c_t.minute_of_day"), "minute_of_day ∉ 0..1439"))
    if not 0 <= value.c_t.day_of_week <= 6:
        out.append(Violation(_join(path, "c_t.day_of_week"), "day_of_week ∉ 0..6"))
    if value.c_s.mood not in MOODS:
        out.append(Violation(_join(path, "c_s.mood"), f"unknown mood {value.c_s.mood!r}"))
    if not _in_unit(value.c_s.need_level):
        out.append(Violation(_join(path, "c_s.need_level"), "need_level ∉ [0,1]"))
    if not _in_unit(value.c_s.energy_level):
        out.append(Violation(_join(path, "c_s.energy_level"), "energy_level ∉ [0,1]"))
    if engaged and not value.c_g.strip():
        out.append(Violation(_join(path, "c_g"), "goal empty"))
    if value.c_b.budget is not None and value.c_b.budget < 0:
        out.append(Violation(_join(path, "c_b.budget"), "budget < 0"))
    if value.c_b.time_available_minutes < 0:
        out.append(Violation(_join(path, "c_b.time_available_minutes"), "time_available < 0"))
    return out


@validate.register
def _(value: Item, path: str = "") -> List[Violation]:
    out = []
    if not value.title.strip():
        out.append(Violation(_join(path, "title"), "title empty"))
    if value.price is not None and value.price < 0:
        out.append(Violation(_join(path, "price"), "price < 0"))
    if value.stat_count < 0:
        out.append(Violation(_join(path, "stat_count"), "stat_count < 0"))
    has_mean = value.stat_mean_rating is not None
    if has_mean != (value.stat_count > 0):
        out.append(Violation(_join(path, "stat_mean_rating"),
                             "stat_mean_rating present iff stat_count > 0"))
    elif has_mean and not 1.0 <= value.stat_mean_rating <= 5.0:
        out.append(Violation(_join(path, "stat_mean_rating"), "stat_mean_rating ∉ [1,5]"))
    return out


@validate.register
def _(value: InteractionRecord, path: str = "") -> List[Violation]:
    out = []
    if value.kind not in INTERACTION_KINDS:
        out.append(Violation(_join(path, "kind"), f"unknown kind {value.kind!r}"))
    if value.kind == "rate" and value.rating is None:
        out.append(Violation(_join(path, "rating"), "rate record without rating"))
    if value.rating is not None and value.rating not in (1, 2, 3, 4, 5):
        out.append(Violation(_join(path, "rating"), "rating ∉ 1..5"))
    return out


@validate.register
def _(value: Rate, path: str = "") -> List[Violation]:
    if not isinstance(value.value, int) or value.value not in (1, 2, 3, 4, 5):
        return [Violation(_join(path, "value"), "rate value ∉ 1..5")]
    return []


@validate.register
def _(value: WebInput, path: str = "") -> List[Violation]:
    out = []
    if not value.text.strip():
        out.append(Violation(_join(path, "text"), "input text empty"))
    if not value.semantic_id:
        out.append(Violation(_join(path, "semantic_id"), "semantic id empty"))
    return out


@validate.register(ClickItem)
@validate.register(WebClick)
@validate.register(Search)
def _(value, path: str = "") -> List[Violation]:
    text = getattr(value, "item_id", None) or getattr(value, "semantic_id", None) \
        or getattr(value, "query", None)
    if not text:
        return [Violation(path or type(value).__name__, "empty argument")]
    return []


@validate.register
def _(value: SessionState, path: str = "") -> List[Violation]:
    out = []
    if value.mode not in MODES:
        out.append(Violation(_join(path, "mode"), f"unknown mode {value.mode!r}"))
    if value.page_number < 1:
        out.append(Violation(_join(path, "page_number"), "page_number < 1"))
    if value.mode != "webshop" and value.interactive_elements:
        out.append(Violation(_join(path, "interactive_elements"),
                             "interactive elements outside webshop mode"))
    for i, item in enumerate(value.items):
        out.extend(validate(item, _join(path, f"items[{i}]")))
    return out


@validate.register
def _(value: Trajectory, path: str = "") -> List[Violation]:
    out = []
    if not value.steps:
        out.append(Violation(_join(path, "steps"), "steps empty"))
    if not is_terminal(value.terminal_action):
        out.append(Violation(_join(path, "terminal_action"), "non-terminal final action"))
    for i, step in enumerate(value.steps):
        out.extend(validate(step.action, _join(path, f"steps[{i}].action")))
    return out


@validate.register
def _(value: EmotionalState, path: str = "") -> List[Violation]:
    out = []
    for name, coordinate in value.as_dict().items():
        if not _in_unit(coordinate):
            out.append(Violation(_join(path, name), f"{name} ∉ [0,1]"))
    return out


@validate.register
def _(value: EpisodicRecord, path: str = "") -> List[Violation]:
    out = []
    if value.step_index < 0:
        out.append(Violation(_join(path, "step_index"), "step_index < 0"))
    if value.kind not in EPISODE_KINDS:
        out.append(Violation(_join(path, "kind"), f"unknown kind {value.kind!r}"))
    if not value.text.strip():
        out.append(Violation(_join(path, "text"), "text empty"))
    return out


def check_mode(action, mode: str) -> Optional[Violation]:
    """Web actions are only legal in webshop mode."""
    if isinstance(action, WEB_ONLY) and mode != "webshop":
        return Violation("action", f"{type(action).__name__} outside webshop mode")
    return None
