"""The browse loop: appraise, feel, act, step the environment, reflect."""

from typing import Iterable, List, Optional

import audit.logger as audit
from agent.bundle import AgentBundle
from agent.policy import (SessionProgress, appraise_page, forced_exit, infer_internal_state,
                          novelty_fraction, reflect, select_action)
from backend.base import CompletionBackend
from domain.actions import ClickItem, Rate, WebClick, is_terminal
from domain.errors import BackendError, InvalidTransition
from domain.types import EpisodicRecord, SessionState, Trajectory, TrajectoryStep
from env.actions import render_action
from env.environment import RecEnv, SessionSpec
from env.render import render_page
from settings import AgentConfig, derive_seed


def _acted_item(state: SessionState, action):
    if isinstance(action, (ClickItem, Rate)):
        return state.find(action.item_id)
    if isinstance(action, WebClick):
        for prefix in ("view_", "add_to_cart_"):
            if action.semantic_id.startswith(prefix):
                return state.find(action.semantic_id[len(prefix):])
    return None


def page_key(state: SessionState):
    """Identity of a page for appraisal: the same page is appraised once per session."""
    return (state.page_number, state.query, state.item_ids())


def _remember(bundle: AgentBundle, action, item):
    """Episodic records for clicks, ratings and cart additions."""
    if item is None:
        return
    memory = bundle.episodic
    if isinstance(action, Rate):
        memory.append(EpisodicRecord(memory.next_step(), "rate",
                                     f"rated {item.title} ({'; '.join(item.labels())}) {action.value}/5",
                                     item.item_id))
        bundle.emotional.update_emotion({"satisfaction": (action.value - 3) / 10}, memory.last_step)
    elif isinstance(action, (ClickItem, WebClick)):
        verb = "added to cart" if render_action(action).startswith("click(add_to_cart_") else "opened"
        memory.append(EpisodicRecord(memory.next_step(), "click",
                                     f"{verb} {item.title} ({'; '.join(item.labels())})", item.item_id))


def run_session(bundle: AgentBundle, env: RecEnv, spec: SessionSpec, config: AgentConfig,
                backend: CompletionBackend, session_id: str, evidence_k: int = 5,
                mask: Optional[Iterable[str]] = None) -> Trajectory:
    """
    Run one session until a terminal action or ``config.max_steps``.

    A backend failure aborts the session; the partial trajectory is returned
    with ``complete=False``.
    """
    mask = list(config.factor_mask if mask is None else mask)
    persona = bundle.prompt_persona(mask)
    audit.session_start(bundle.agent_id, session_id)
    progress = SessionProgress(start=bundle.emotional.state)
    intentions_by_page = {}
    steps: List[TrajectoryStep] = []
    terminal = None
    forced = False
    complete = True
    state = env.reset(spec)

    try:
        for step_no in range(config.max_steps):
            seed = derive_seed(spec.seed, session_id, step_no)
            key = page_key(state)
            if key not in intentions_by_page:
                intentions_by_page[key] = appraise_page(state, persona, bundle.episodic, backend,
                                                        mask, evidence_k, seed)
                progress.note_page(intentions_by_page[key])
                progress.novelty = novelty_fraction(state, bundle.episodic)
            intentions = intentions_by_page[key]

            internal = infer_internal_state(progress, persona, spec.context, bundle.emotional.state,
                                            backend, mask, config.fatigue_step, config.boredom_step,
                                            seed)
            bundle.emotional.set_levels(bundle.episodic.next_step(), fatigue=internal.fatigue,
                                        curiosity=internal.curiosity, boredom=internal.boredom)

            thought, action, was_forced = select_action(
                state, intentions, internal, persona, bundle.episodic, backend, progress, mask,
                config.thoughts_on, config.boredom_threshold, evidence_k, seed)
            digest = render_page(state, mask)
            if was_forced:
                steps.append(TrajectoryStep(digest, thought, action, state.page_number))
                terminal, forced = action, True
                break

            try:
                next_state = env.step(state, action, spec)
            except InvalidTransition as e:
                audit.warn(f"agent={bundle.agent_id} rejected transition {render_action(action)}: {e}")
                action = forced_exit(state.mode)
                steps.append(TrajectoryStep(digest, thought, action, state.page_number))
                terminal, forced = action, True
                break
            steps.append(TrajectoryStep(digest, thought, action, state.page_number))
            progress.note_action(action)

            item = _acted_item(state, action)
            if isinstance(action, ClickItem) or (isinstance(action, WebClick)
                                                 and action.semantic_id.startswith("view_")):
                progress.visited = progress.visited + (item.item_id,) if item else progress.visited
            if isinstance(action, Rate):
                progress.rated = progress.rated + (action.item_id,)
            _remember(bundle, action, item)
            reflect(action, item, thought, persona, bundle.episodic, backend, seed)

            state = next_state
            if is_terminal(action) and state.terminated:
                terminal = action
                break
        if terminal is None:
            terminal, forced = forced_exit(state.mode), True
    except BackendError as e:
        audit.error(f"agent={bundle.agent_id} session={session_id} aborted: {e}")
        terminal, forced, complete = forced_exit(state.mode), True, False

    trajectory = Trajectory(agent_id=bundle.agent_id, session_id=session_id, context=spec.context,
                            steps=tuple(steps), terminal_action=terminal, forced_exit=forced,
                            complete=complete, strategy=env.strategy.name, mode=state.mode)
    audit.session_end(bundle.agent_id, session_id, render_action(terminal), len(steps),
                      forced, complete)
    return trajectory
