"""Daily schedules: 48 half-hour slots per day, from a template library or a model."""

import json
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

import audit.logger as audit
from backend.base import CompletionBackend
from domain.errors import ConfigError, ScheduleParseFailure
from domain.types import Persona
from prompts.blocks import persona_block
from prompts.templates import SCHEDULE

SLOTS_PER_DAY = 48
SLOT_MINUTES = 30
ACTIVITY_CLASSES = ("sleep", "work", "commute", "meal", "leisure", "social", "chores", "rest")
DAY_TYPES = ("weekday", "weekend")

DEFAULT_TEMPLATES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates.json")

_SLOT_LINE = re.compile(
    r"^\s*(?:[-*]\s*)?SLOT\s+(\d{1,2})\s*\|\s*(\d{1,2}:\d{2})\s*\|\s*([A-Za-z]+)\s*\|\s*(.*?)\s*\|\s*(.*?)\s*$",
    re.IGNORECASE | re.MULTILINE)


@dataclass(frozen=True)
class ScheduleSlot:
    index: int
    activity: str
    activity_class: str
    location: str

    @property
    def start_minute(self) -> int:
        return SLOT_MINUTES * self.index


@dataclass(frozen=True)
class Externals:
    weather: str
    season: str
    event: Optional[str] = None


@dataclass(frozen=True)
class DailySchedule:
    agent_id: str
    day_index: int
    day_type: str
    externals: Externals
    slots: Tuple[ScheduleSlot, ...]

    @property
    def day_of_week(self) -> int:
        return self.day_index % 7


def day_type_of(day_index: int) -> str:
    return "weekend" if day_index % 7 >= 5 else "weekday"


@lru_cache(maxsize=8)
def load_library(path: Optional[str] = None) -> dict:
    """
    The template library; editable without code changes. Cached per path.

    Raises:
        ConfigError: the file is missing or not valid JSON
    """
    try:
        with open(path or DEFAULT_TEMPLATES, encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load template library {path or DEFAULT_TEMPLATES}: {e}") from e


def occupation_class(occupation: str, library: Optional[dict] = None) -> str:
    library = library or load_library()
    text = occupation.lower()
    for name, keywords in library["occupation_classes"].items():
        if any(k in text for k in keywords):
            return name
    return library["default_class"]


def template_rows(occupation_cls: str, day_type: str, library: Optional[dict] = None) -> List[list]:
    library = library or load_library()
    return library["templates"][occupation_cls][day_type]


def render_template_rows(rows: List[list]) -> str:
    return "\n".join(f"- {start:02d}-{end:02d} | {cls} | {' / '.join(options)} | {location}"
                     for start, end, cls, options, location in rows)


def sample_externals(day_index: int, seed: int, library: Optional[dict] = None) -> Externals:
    table = (library or load_library())["externals"]
    rng = np.random.default_rng(seed)
    weights = np.asarray(table["weather_weights"], dtype=float)
    weather = table["weather"][int(rng.choice(len(table["weather"]), p=weights / weights.sum()))]
    season = table["seasons"][(day_index // 91) % len(table["seasons"])]
    event = None
    if rng.random() < table["event_probability"]:
        event = table["events"][int(rng.integers(len(table["events"])))]
    return Externals(weather=weather, season=season, event=event)


def parse_schedule(text: str) -> Dict[int, ScheduleSlot]:
    """Slots found in a SCHEDULE reply, keyed by index; the first line for an index wins."""
    slots: Dict[int, ScheduleSlot] = {}
    for match in _SLOT_LINE.finditer(text or ""):
        index = int(match.group(1))
        cls = match.group(3).lower()
        activity = match.group(4).strip()
        location = match.group(5).strip().lower()
        if index >= SLOTS_PER_DAY or index in slots:
            continue
        if cls not in ACTIVITY_CLASSES or not activity or not location:
            continue
        slots[index] = ScheduleSlot(index=index, activity=activity, activity_class=cls,
                                    location=location)
    return slots


def _missing(slots: Dict[int, ScheduleSlot]) -> List[int]:
    return [i for i in range(SLOTS_PER_DAY) if i not in slots]


def generate_schedule(persona: Persona, day_index: int, day_type: str, externals: Externals,
                      seed: int, backend: CompletionBackend, previous: Optional[DailySchedule] = None,
                      library: Optional[dict] = None) -> DailySchedule:
    """
    Plan one day of ``persona``.

    The prompt carries the persona's typical day for its occupation class and
    day type; the scripted backend fills it with seeded activity choices.

    Raises:
        ScheduleParseFailure: slots still missing after one repair round
    """
    if day_type not in DAY_TYPES:
        raise ValueError(f"day_type must be weekday or weekend, got {day_type!r}")
    library = library or load_library()
    cls = occupation_class(persona.occupation, library)
    data = dict(persona=persona_block(persona), occupation_class=cls, day_index=day_index,
                day_type=day_type, weather=externals.weather, season=externals.season,
                event=externals.event or "none",
                previous=_previous_summary(previous),
                template_rows=render_template_rows(template_rows(cls, day_type, library)),
                repair="")
    slots = parse_schedule(backend.complete(SCHEDULE.request(seed=seed, **data)).text)
    gaps = _missing(slots)
    if gaps:
        audit.retry(1, 2, f"SCHEDULE agent={persona.agent_id} day={day_index} missing={len(gaps)}")
        data["repair"] = ("Your previous plan was missing these slots: "
                          + ", ".join(f"{i:02d}" for i in gaps) + ". Return all 48 slots.\n")
        repaired = parse_schedule(backend.complete(SCHEDULE.request(seed=seed, **data)).text)
        for index, slot in repaired.items():
            slots.setdefault(index, slot)
        gaps = _missing(slots)
        if gaps:
            raise ScheduleParseFailure(f"agent={persona.agent_id} day={day_index}: "
                                       f"{len(gaps)} slots missing after repair")
    return DailySchedule(agent_id=persona.agent_id, day_index=day_index, day_type=day_type,
                         externals=externals, slots=tuple(slots[i] for i in range(SLOTS_PER_DAY)))


def _previous_summary(previous: Optional[DailySchedule]) -> str:
    if previous is None:
        return "none"
    seen = []
    for slot in previous.slots:
        if slot.activity_class not in ("sleep",) and slot.activity not in seen:
            seen.append(slot.activity)
    return "; ".join(seen[:6]) or "none"
