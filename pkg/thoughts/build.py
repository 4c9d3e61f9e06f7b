"""Builders for the item-disentanglement (ID) and trajectory-alignment (TA) corpora."""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import audit.logger as audit
from backend.base import CompletionBackend
from backend.parsing import parse_tagged_field
from domain.actions import Action, ClickItem, Rate, Search, WebClick, WebInput
from domain.errors import SimulationError
from domain.types import (FACTORS, ContextVector, InteractionRecord, Item, Persona, SessionState,
                          id_sort_key)
from env.actions import is_legal, legal_actions, render_action
from env.render import render_page
from prompts.asking import ask
from prompts.blocks import context_line, history_rows, item_row, persona_block
from prompts.templates import THOUGHT_ID, THOUGHT_TA
from thoughts.records import ThoughtInputs, ThoughtRecord


class RationaleMissing(SimulationError):
    pass


@dataclass(frozen=True)
class SourceStep:
    """One (state, action, history) triple a TA record is built from."""
    agent_id: str
    state: SessionState
    action: Action
    history: Tuple[InteractionRecord, ...] = ()
    context: Optional[ContextVector] = None


def _rationale(text: str) -> str:
    value = parse_tagged_field(text, "RATIONALE")
    if not value:
        raise ValueError("empty rationale")
    return value


def _history_lines(rows: str) -> Tuple[str, ...]:
    return tuple(line[2:] for line in rows.splitlines() if line.startswith("- "))


def build_id_records(persona: Persona, train: Sequence[InteractionRecord], catalog: Dict[str, Item],
                     backend: CompletionBackend, cap: int = 50, seed: int = 0,
                     context: Optional[ContextVector] = None, history_size: int = 10) -> List[ThoughtRecord]:
    """
    Rationales for why the user gave each training rating.

    Users with more than ``cap`` rated items are subsampled uniformly with ``seed``.
    """
    rated = sorted((r for r in train if r.rating is not None and r.item_id in catalog),
                   key=lambda r: (r.timestamp, id_sort_key(r.item_id)))
    if not rated:
        audit.warn(f"agent={persona.agent_id} has no rated training items, skipped")
        return []
    if len(rated) > cap:
        keep = np.sort(np.random.default_rng(seed).choice(len(rated), size=cap, replace=False))
        chosen = [rated[i] for i in keep]
    else:
        chosen = rated

    records = []
    for target in chosen:
        item = catalog[target.item_id]
        others = [r for r in rated if r.item_id != target.item_id][-history_size:]
        history = history_rows(others, catalog)
        try:
            rationale = ask(backend, THOUGHT_ID, _rationale, RationaleMissing, seed=seed,
                            persona=persona_block(persona), context=context_line(context),
                            history=history, item=item_row(item),
                            description=" ".join((item.description or item.title).split()),
                            rating=target.rating)
        except RationaleMissing as e:
            audit.warn(f"agent={persona.agent_id} item={item.item_id} no rationale: {e}")
            continue
        inputs = ThoughtInputs(state_digest=f"ITEM: {item_row(item)}\nGIVEN_RATING: {target.rating}",
                               action=Rate(item.item_id, target.rating), persona=persona,
                               history=_history_lines(history), context=context,
                               item_id=item.item_id, rating=target.rating)
        records.append(ThoughtRecord("ID", persona.agent_id, inputs, rationale))
    return records


def legal_set(state: SessionState, action: Action) -> List[Action]:
    """Enumerable legal actions, plus ``action`` itself when it is a legal free-text action."""
    actions = legal_actions(state)
    if isinstance(action, (Search, WebInput)) and is_legal(action, state) and action not in actions:
        actions.append(action)
    return actions


def _taken_item(state: SessionState, action: Action) -> Optional[Item]:
    if isinstance(action, (ClickItem, Rate)):
        return state.find(action.item_id)
    if isinstance(action, WebClick):
        for prefix in ("view_", "add_to_cart_"):
            if action.semantic_id.startswith(prefix):
                return state.find(action.semantic_id[len(prefix):])
    return None


def build_ta_records(sources: Iterable[SourceStep], personas: Dict[str, Persona],
                     catalog: Dict[str, Item], backend: CompletionBackend,
                     seed: int = 0) -> List[ThoughtRecord]:
    """One record per usable step: why the taken action beats the other legal ones."""
    records = []
    for n, source in enumerate(sources):
        persona = personas.get(source.agent_id)
        if persona is None:
            audit.warn(f"TA step {n} skipped: no persona for {source.agent_id}")
            continue
        legal = legal_set(source.state, source.action)
        if not legal or source.action not in legal:
            audit.warn(f"TA step {n} of {source.agent_id} skipped: no legal-action set for "
                       f"{render_action(source.action)}")
            continue
        alternatives = tuple(a for a in legal if a != source.action)
        if not alternatives:
            audit.warn(f"TA step {n} of {source.agent_id} skipped: no alternatives")
            continue
        history = history_rows(source.history, catalog)
        item = _taken_item(source.state, source.action)
        state_text = render_page(source.state, FACTORS)
        try:
            rationale = ask(backend, THOUGHT_TA, _rationale, RationaleMissing, seed=seed,
                            persona=persona_block(persona), context=context_line(source.context),
                            history=history, state=state_text, action=render_action(source.action),
                            item=item_row(item) if item else "none",
                            alternatives="\n".join(f"- {render_action(a)}" for a in alternatives))
        except RationaleMissing as e:
            audit.warn(f"TA step {n} of {source.agent_id} no rationale: {e}")
            continue
        inputs = ThoughtInputs(state_digest=state_text, action=source.action, persona=persona,
                               history=_history_lines(history), alternatives=alternatives,
                               context=source.context, item_id=item.item_id if item else None)
        records.append(ThoughtRecord("TA", source.agent_id, inputs, rationale))
    return records


def reconstruct_sources(agent_id: str, train: Sequence[InteractionRecord], catalog: Dict[str, Item],
                        page_size: int = 4, history_size: int = 10) -> List[SourceStep]:
    """
    Synthetic sessions from a rating history: consecutive rated items form a
    page and every rating becomes a Rate step on it.
    """
    rated = sorted((r for r in train if r.rating is not None and r.item_id in catalog),
                   key=lambda r: (r.timestamp, id_sort_key(r.item_id)))
    steps = []
    for start in range(0, len(rated), page_size):
        page = rated[start:start + page_size]
        state = SessionState(mode="recommendation", page_number=start // page_size + 1,
                             items=tuple(catalog[r.item_id] for r in page))
        history = tuple(rated[max(0, start - history_size):start])
        for record in page:
            steps.append(SourceStep(agent_id, state, Rate(record.item_id, record.rating), history))
    return steps


def logged_sources(sessions, histories: Dict[str, List[InteractionRecord]],
                   history_size: int = 10) -> List[SourceStep]:
    """Source steps from recorded session logs."""
    steps = []
    for session in sessions:
        history = tuple(histories.get(session.user_id, [])[-history_size:])
        for state, action in session.steps:
            steps.append(SourceStep(session.user_id, state, action, history))
    return steps
