"""
The user-agent policy: each function is one reasoning step of a browsing
session, rendered into a task-tagged prompt and parsed back.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import audit.logger as audit
from backend import rules
from backend.base import CompletionBackend
from backend.parsing import parse_int, parse_pairs, parse_tagged_field, parse_float
from domain.actions import Action, Exit, WebTerminate, action_type
from domain.errors import (AppraisalFailure, ClassificationFailure, FieldMissing,
                           InterviewFailure, MalformedAction, RatingFailure)
from domain.types import (FACTORS, ContextVector, EmotionalState, EpisodicRecord, Item, Persona,
                          SessionState, Trajectory)
from env.actions import GRAMMAR_HELP, is_legal, legal_action_lines, parse_action, render_action
from env.render import render_page
from memory.episodic import EpisodicMemory
from prompts.asking import ask
from prompts.blocks import context_line, evidence_rows, id_list, item_row, item_rows, persona_block
from prompts.templates import ACT, APPRAISE, CLASSIFY, INTERNAL, INTERVIEW, RATE, REFLECT

VERDICTS = ("WATCH", "SKIP")

THOUGHT_INSTRUCTION = ("Weigh the available actions against your taste, your state and your situation.\n"
                       "Reply with:\nTHOUGHT: <one or two sentences>\nACTION: <one legal action>")
ACTION_INSTRUCTION = "Reply with one line:\nACTION: <one legal action>"


@dataclass(frozen=True)
class Intention:
    item_id: str
    verdict: str
    confidence: float


@dataclass
class SessionProgress:
    """What the agent has done so far in the current session."""
    start: EmotionalState
    steps_taken: int = 0
    zero_watch_streak: int = 0
    novelty: float = 0.0
    visited: Tuple[str, ...] = ()
    rated: Tuple[str, ...] = ()
    recent: Tuple[str, ...] = ()

    def note_page(self, intentions: Sequence[Intention]):
        if any(i.verdict == "WATCH" for i in intentions):
            self.zero_watch_streak = 0
        else:
            self.zero_watch_streak += 1

    def note_action(self, action: Action):
        self.steps_taken += 1
        self.recent = (self.recent + (render_action(action),))[-5:]


def _page_query(state: SessionState) -> str:
    return " ".join(item.title for item in state.items)


def parse_intentions(text: str, state: SessionState) -> List[Intention]:
    """One intention per page item, in page order."""
    found: Dict[str, Intention] = {}
    for item_id, value in parse_pairs(parse_tagged_field(text, "INTENTIONS")):
        verdict, _, confidence = value.partition(":")
        verdict = verdict.strip().upper().strip("[]")
        if verdict not in VERDICTS:
            raise ValueError(f"verdict {verdict!r} for {item_id}")
        try:
            conf = rules.clamp(float(confidence)) if confidence.strip() else 0.5
        except ValueError:
            conf = 0.5
        found.setdefault(item_id, Intention(item_id, verdict, conf))
    missing = [i for i in state.item_ids() if i not in found]
    if missing:
        raise ValueError(f"no intention for {', '.join(missing)}")
    return [found[i] for i in state.item_ids()]


def appraise_page(state: SessionState, persona: Persona, memory: EpisodicMemory,
                  backend: CompletionBackend, mask: Iterable[str] = FACTORS, k: int = 5,
                  seed: Optional[int] = None) -> List[Intention]:
    """
    WATCH/SKIP intention for every item on the page.

    Raises:
        AppraisalFailure: the reply was rejected twice
    """
    if not state.items:
        return []
    evidence = memory.retrieve(_page_query(state), k)
    return ask(backend, APPRAISE, lambda text: parse_intentions(text, state), AppraisalFailure,
               seed=seed, persona=persona_block(persona), evidence=evidence_rows(evidence),
               items=item_rows(state.items), page=render_page(state, mask))


def novelty_fraction(state: SessionState, memory: EpisodicMemory) -> float:
    if not state.items:
        return 0.0
    known = set(memory.item_ids())
    return sum(1 for item in state.items if item.item_id not in known) / len(state.items)


def infer_internal_state(progress: SessionProgress, persona: Persona, context: Optional[ContextVector],
                         emotional: EmotionalState, backend: CompletionBackend,
                         mask: Iterable[str] = FACTORS, fatigue_step: float = 0.05,
                         boredom_step: float = 0.15, seed: Optional[int] = None) -> EmotionalState:
    """Fatigue, curiosity and boredom after the steps taken so far; satisfaction is carried over."""
    request = INTERNAL.request(
        seed=seed, persona=persona_block(persona), context=context_line(context, mask),
        steps=progress.steps_taken, streak=progress.zero_watch_streak,
        novelty=f"{progress.novelty:.4f}", openness=persona.traits.openness,
        start_fatigue=f"{progress.start.fatigue:.4f}", start_boredom=f"{progress.start.boredom:.4f}",
        fatigue_step=fatigue_step, boredom_step=boredom_step,
        recent=", ".join(progress.recent) or "none")
    text = backend.complete(request).text
    try:
        fatigue = rules.clamp(parse_float(text, "FATIGUE"))
        curiosity = rules.clamp(parse_float(text, "CURIOSITY"))
        boredom = rules.clamp(parse_float(text, "BOREDOM"))
    except FieldMissing as e:
        audit.warn(f"agent={persona.agent_id} internal state unreadable ({e}), using rule")
        fatigue, curiosity, boredom = rules.internal_state_rule(
            progress.start.fatigue, progress.start.boredom, progress.steps_taken,
            progress.zero_watch_streak, persona.traits.openness, progress.novelty,
            fatigue_step, boredom_step)
    return EmotionalState(fatigue=fatigue, satisfaction=emotional.satisfaction,
                          curiosity=curiosity, boredom=boredom)


def forced_exit(mode: str) -> Action:
    return WebTerminate() if mode == "webshop" else Exit()


def _parse_act(text: str, state: SessionState, thoughts_on: bool) -> Tuple[str, Action]:
    try:
        raw_action = parse_tagged_field(text, "ACTION")
    except FieldMissing:
        raw_action = text
    action = parse_action(raw_action)
    if not is_legal(action, state):
        raise MalformedAction(f"{render_action(action)} is not legal on this page")
    thought = ""
    if thoughts_on:
        thought = parse_tagged_field(text, "THOUGHT")
        if not thought:
            raise FieldMissing("THOUGHT")
    return thought, action


def select_action(state: SessionState, intentions: Sequence[Intention], internal: EmotionalState,
                  persona: Persona, memory: EpisodicMemory, backend: CompletionBackend,
                  progress: SessionProgress, mask: Iterable[str] = FACTORS,
                  thoughts_on: bool = True, boredom_threshold: float = 0.8, k: int = 5,
                  seed: Optional[int] = None) -> Tuple[str, Action, bool]:
    """
    Thought and next action for ``state``.

    Returns:
        (thought, action, forced); ``forced`` marks the exit taken after a
        malformed reply and its corrective re-prompt
    """
    evidence = memory.retrieve(_page_query(state), k)
    data = dict(
        persona=persona_block(persona), mode=state.mode,
        fatigue=f"{internal.fatigue:.4f}", curiosity=f"{internal.curiosity:.4f}",
        boredom=f"{internal.boredom:.4f}", threshold=boredom_threshold,
        items=item_rows(state.items),
        intentions=", ".join(f"{i.item_id}={i.verdict}:{i.confidence:.2f}" for i in intentions) or "none",
        visited=id_list(progress.visited), rated=id_list(progress.rated),
        expanded=state.expanded_item or "none", cart=id_list(state.cart),
        evidence=evidence_rows(evidence), page=render_page(state, mask),
        legal="\n".join(f"- {line}" for line in legal_action_lines(state)),
        instruction=THOUGHT_INSTRUCTION if thoughts_on else ACTION_INSTRUCTION)
    try:
        thought, action = ask(backend, ACT, lambda text: _parse_act(text, state, thoughts_on),
                              MalformedAction, seed=seed,
                              correction=lambda e: (f"Your previous reply was rejected ({e}). "
                                                    f"Use exactly one action of this grammar: "
                                                    f"{GRAMMAR_HELP}\n"),
                              **data)
        return thought, action, False
    except MalformedAction as e:
        audit.warn(f"agent={persona.agent_id} forced exit: {e}")
        thought = "I could not settle on an action, so I am leaving." if thoughts_on else ""
        return thought, forced_exit(state.mode), True


def rate_item(item: Item, persona: Persona, memory: EpisodicMemory, backend: CompletionBackend,
              context: Optional[ContextVector] = None, mask: Iterable[str] = FACTORS, k: int = 5,
              seed: Optional[int] = None) -> int:
    """
    The agent's 1..5 rating of ``item``.

    An out-of-range rating is re-asked once and clamped if repeated.

    Raises:
        RatingFailure: no RATING line in either reply
    """
    evidence = memory.retrieve(f"{item.title} {' '.join(item.labels())}", k)
    data = dict(persona=persona_block(persona), context=context_line(context, mask),
                evidence=evidence_rows(evidence), item=item_row(item),
                description=" ".join((item.description or item.title).split()), correction="")
    last_value = None
    for attempt in (1, 2):
        text = backend.complete(RATE.request(seed=seed, **data)).text
        try:
            value = parse_int(text, "RATING")
        except FieldMissing as e:
            if attempt == 2:
                raise RatingFailure(f"no rating for {item.item_id}: {e}") from e
            audit.retry(attempt, 2, f"RATE: {e}")
            continue
        if 1 <= value <= 5:
            return value
        last_value = value
        if attempt == 1:
            audit.retry(attempt, 2, f"RATE: rating {value} outside 1..5")
            data["correction"] = "RATING must be an integer from 1 to 5.\n"
    return max(1, min(5, last_value))


def parse_classification(text: str, items: Sequence[Item]) -> Dict[str, bool]:
    labels: Dict[str, bool] = {}
    for item_id, value in parse_pairs(parse_tagged_field(text, "CLASSIFICATION")):
        norm = value.strip().strip('"').lower().replace("_", " ")
        if norm not in ("interacted", "not interacted", "notinteracted"):
            raise ValueError(f"label {value!r} for {item_id}")
        labels[item_id] = norm == "interacted"
    wanted = [item.item_id for item in items]
    if len(labels) != len(wanted) or any(i not in labels for i in wanted):
        raise ValueError(f"{len(labels)} labels for {len(wanted)} items")
    return {i: labels[i] for i in wanted}


def classify_interacted(items: Sequence[Item], persona: Persona, memory: EpisodicMemory,
                        backend: CompletionBackend, item_type: str = "movie",
                        history_size: int = 30, seed: Optional[int] = None) -> Dict[str, bool]:
    """
    Interacted (True) or not (False) for every item, keyed by item id.

    Raises:
        ClassificationFailure: label count mismatch on two replies
    """
    if not items:
        raise ValueError("items must be non-empty")
    history = [r for r in memory.records if r.kind in ("view", "rate")][-history_size:]
    return ask(backend, CLASSIFY, lambda text: parse_classification(text, items),
               ClassificationFailure, seed=seed,
               correction=lambda e: f"Your previous reply was rejected ({e}); label every item exactly once.\n",
               persona=persona_block(persona), history=evidence_rows(history),
               memory_ids=id_list(memory.item_ids()), items=item_rows(items), item_type=item_type)


def _fallback_reflection(action: Action, item: Optional[Item], persona: Persona) -> str:
    matched = rules.matched_labels(item.labels(), persona.preferences) if item else []
    if matched:
        return f"chose {render_action(action)} because it matches my taste for {matched[0]}"
    prefs = [p.strip() for p in persona.preferences.split(",") if p.strip()]
    return (f"chose {render_action(action)} because nothing here matched my taste for "
            f"{prefs[0] if prefs else 'anything'}")


def reflect(action: Action, acted_item: Optional[Item], thought: str, persona: Persona,
            memory: EpisodicMemory, backend: CompletionBackend,
            seed: Optional[int] = None) -> EpisodicRecord:
    """Short self-reflection on the last action, appended to episodic memory."""
    request = REFLECT.request(seed=seed, persona=persona_block(persona),
                              action=render_action(action),
                              item=item_row(acted_item) if acted_item else "none",
                              thought=thought or "none")
    try:
        text = parse_tagged_field(backend.complete(request).text, "REFLECTION")
    except FieldMissing:
        text = ""
    if not text.strip():
        text = _fallback_reflection(action, acted_item, persona)
    record = EpisodicRecord(step_index=memory.next_step(), kind="reflection", text=text,
                            item_id=acted_item.item_id if acted_item else None)
    memory.append(record)
    return record


def session_summary(trajectory: Trajectory) -> str:
    counts: Dict[str, int] = {}
    for step in trajectory.steps:
        name = action_type(step.action)
        counts[name] = counts.get(name, 0) + 1
    lines = [f"- steps: {len(trajectory.steps)}",
             f"- actions: {', '.join(f'{k}={v}' for k, v in sorted(counts.items())) or 'none'}",
             f"- ended with: {render_action(trajectory.terminal_action)}"]
    return "\n".join(lines)


def _parse_interview(text: str) -> Tuple[int, str]:
    rating = parse_int(text, "RATING")
    if not 1 <= rating <= 10:
        raise ValueError(f"rating {rating} outside 1..10")
    return rating, parse_tagged_field(text, "REASON")


def post_interview(persona: Persona, trajectory: Trajectory, backend: CompletionBackend,
                   satisfaction: float = 0.5, seed: Optional[int] = None) -> Tuple[int, str]:
    """
    Satisfaction interview after a completed session.

    Raises:
        InterviewFailure: no valid RATING/REASON after one re-prompt
    """
    return ask(backend, INTERVIEW, _parse_interview, InterviewFailure, seed=seed,
               correction=lambda e: f"Your previous answer was rejected ({e}).\n",
               persona=persona_block(persona), summary=session_summary(trajectory),
               satisfaction=f"{rules.clamp(satisfaction):.4f}")
