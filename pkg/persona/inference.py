"""
Persona inference: generate K candidates from the earliest part of a user's
training history, score each against the most recent part, keep the best.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import audit.logger as audit
from backend.base import CompletionBackend
from backend.parsing import parse_int, parse_tagged_field, pairs_dict
from domain.errors import (EmptyHistory, FieldMissing, NoCandidates, PersonaParseFailure,
                           ScoreFailure)
from domain.types import HABIT_LEVELS, HABIT_NAMES, BigFive, InteractionRecord, Item, Persona
from ingest.loader import Demographics
from prompts.asking import ask
from prompts.blocks import history_rows, item_rows, persona_block
from prompts.templates import PERSONA, SCORE

_TRAIT_KEYS = {"O": "openness", "C": "conscientiousness", "E": "extraversion",
               "A": "agreeableness", "N": "neuroticism"}


@dataclass(frozen=True)
class PersonaCandidate:
    persona: Persona
    consistency_score: Optional[float] = None


def _trait_value(raw: str) -> int:
    match = re.match(r"\d+", raw.strip())
    if not match:
        raise ValueError(f"trait value {raw!r}")
    return min(3, max(1, int(match.group(0))))


def parse_persona(text: str, agent_id: str) -> Persona:
    """
    Build a Persona from a PERSONA reply.

    Raises:
        FieldMissing: a required line is absent
        ValueError: a value cannot be read
    """
    age = parse_int(text, "AGE")
    if not 13 <= age <= 100:
        raise ValueError(f"age {age} outside 13..100")
    occupation = parse_tagged_field(text, "OCCUPATION")
    raw_traits = pairs_dict(parse_tagged_field(text, "TRAITS"))
    traits = {}
    for key, name in _TRAIT_KEYS.items():
        value = raw_traits.get(key.lower(), raw_traits.get(name))
        traits[name] = _trait_value(value) if value is not None else 2
    raw_habits = pairs_dict(parse_tagged_field(text, "HABITS"))
    habits = []
    for name in HABIT_NAMES:
        level = raw_habits.get(name, "medium").lower()
        habits.append(f"{name}={level if level in HABIT_LEVELS else 'medium'}")
    goals = tuple(g.strip() for g in re.split(r"[;\n]", parse_tagged_field(text, "GOALS")) if g.strip())
    preferences = parse_tagged_field(text, "PREFERENCES")
    if not preferences or not occupation:
        raise ValueError("empty preferences or occupation")
    return Persona(agent_id=agent_id, age=age, occupation=occupation,
                   traits=BigFive(**traits), habits=tuple(habits), recent_goals=goals,
                   preferences=preferences)


def _demographics_line(demographics: Optional[Demographics]) -> str:
    if demographics is None:
        return ""
    return f"DEMOGRAPHICS: age={demographics.age}, occupation={demographics.occupation}\n"


def generate_candidates(history_sample: Sequence[InteractionRecord], catalog: Dict[str, Item],
                        k: int, backend: CompletionBackend, agent_id: str,
                        demographics: Optional[Demographics] = None,
                        seed: Optional[int] = None) -> List[PersonaCandidate]:
    """
    Ask the backend for ``k`` candidate personas (scores unset).

    Raises:
        EmptyHistory: ``history_sample`` is empty
        PersonaParseFailure: a candidate reply was rejected twice
    """
    if not history_sample:
        raise EmptyHistory(f"no history for {agent_id}")
    if k < 1:
        raise ValueError("k must be >= 1")
    history = history_rows(history_sample, catalog)
    candidates = []
    for index in range(1, k + 1):
        persona = ask(backend, PERSONA, lambda text: parse_persona(text, agent_id),
                      PersonaParseFailure, seed=seed,
                      candidate=f"{index} of {k}",
                      demographics=_demographics_line(demographics), history=history)
        if demographics is not None:
            persona = Persona(agent_id=agent_id, age=demographics.age,
                              occupation=demographics.occupation, traits=persona.traits,
                              habits=persona.habits, recent_goals=persona.recent_goals,
                              preferences=persona.preferences)
        candidates.append(PersonaCandidate(persona))
    return candidates


def _parse_score(text: str) -> float:
    value = parse_int(text, "SCORE")
    if not 0 <= value <= 100:
        raise ValueError(f"score {value} outside 0..100")
    return value / 100


def score_consistency(candidate: Persona, held_out: Sequence[InteractionRecord],
                      catalog: Dict[str, Item], backend: CompletionBackend,
                      seed: Optional[int] = None) -> float:
    """
    Consistency of ``candidate`` with the held-out interactions, in [0, 1].

    Raises:
        ScoreFailure: the reply has no usable SCORE line
    """
    if not held_out:
        raise ValueError("held_out must be non-empty")
    items = [catalog.get(r.item_id) or Item(item_id=r.item_id, title=r.item_id) for r in held_out]
    return ask(backend, SCORE, _parse_score, ScoreFailure, seed=seed, attempts=1,
               persona=persona_block(candidate), items=item_rows(items))


def select_persona(candidates: Sequence[PersonaCandidate]) -> Persona:
    """Highest-scoring candidate; the earliest one wins ties."""
    if not candidates:
        raise NoCandidates("no persona candidates")
    best = 0
    for index, candidate in enumerate(candidates):
        if candidate.consistency_score is None:
            raise ValueError(f"candidate {index} is not scored")
        if candidate.consistency_score > candidates[best].consistency_score:
            best = index
    return candidates[best].persona


def holdout_split(history: Sequence[InteractionRecord], holdout: float = 0.3
                  ) -> Tuple[List[InteractionRecord], List[InteractionRecord]]:
    """
    Earliest part for generation, most recent ``holdout`` fraction for scoring.

    Both parts are non-empty when the history has two or more records; a
    single record serves both.
    """
    ordered = sorted(history, key=lambda r: r.timestamp)
    if len(ordered) <= 1:
        return list(ordered), list(ordered)
    n_hold = min(len(ordered) - 1, max(1, int(len(ordered) * holdout)))
    return ordered[:-n_hold], ordered[-n_hold:]


def infer_persona(agent_id: str, train: Sequence[InteractionRecord], catalog: Dict[str, Item],
                  backend: CompletionBackend, k: int = 5, sample_size: int = 30,
                  holdout: float = 0.3, demographics: Optional[Demographics] = None,
                  seed: Optional[int] = None) -> Tuple[Persona, List[PersonaCandidate]]:
    """Full generate-score-select pipeline for one user."""
    generation, held_out = holdout_split(train, holdout)
    sample = generation[-sample_size:]
    candidates = generate_candidates(sample, catalog, k, backend, agent_id, demographics, seed)
    scored = []
    for candidate in candidates:
        try:
            score = score_consistency(candidate.persona, held_out, catalog, backend, seed)
        except (ScoreFailure, FieldMissing) as e:
            audit.warn(f"agent={agent_id} persona score failed, scoring 0: {e}")
            score = 0.0
        scored.append(PersonaCandidate(candidate.persona, score))
    return select_persona(scored), scored
