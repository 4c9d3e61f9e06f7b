"""Population runs: life simulation, session scheduling and the browse loop per agent."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import audit.logger as audit
from agent.bundle import AgentBundle, build_bundle
from agent.policy import post_interview
from agent.session import run_session
from backend.base import CompletionBackend
from domain.errors import InterviewFailure
from domain.types import ContextVector, InteractionRecord, Item, Persona, Trajectory, id_sort_key
from env.environment import RecEnv, SessionSpec
from lifesim.engagement import Engagement
from lifesim.life import LifeLog, live_days, session_engagements, uniform_sessions
from lifesim.context import minimal_context
from lifesim.schedule import load_library
from lifesim.summary import summarize_contexts
from settings import RunConfig, derive_seed


@dataclass
class AgentRun:
    bundle: AgentBundle
    trajectories: List[Trajectory] = field(default_factory=list)
    engagements: List[Engagement] = field(default_factory=list)
    life: Optional[LifeLog] = None
    interviews: List[Tuple[int, str]] = field(default_factory=list)


def effective_mask(cfg: RunConfig) -> List[str]:
    """Context factors shown in prompts for this configuration."""
    if not cfg.lifesim.enabled:
        return []
    if cfg.agent.variant == "sum":
        return [f for f in cfg.agent.factor_mask if f == "c_t"]
    return list(cfg.agent.factor_mask)


def plan_sessions(bundle: AgentBundle, cfg: RunConfig, backend: CompletionBackend,
                  root_seed: int) -> Tuple[List[Tuple[Engagement, ContextVector]], Optional[LifeLog]]:
    """
    Engagement moments and contexts for an agent's sessions.

    The summary variant also attaches the multi-day context summary to the
    bundle's persona.
    """
    count = cfg.agent.sessions_per_agent
    if not cfg.lifesim.enabled:
        return uniform_sessions(bundle.agent_id, count, cfg.lifesim.horizon_days, root_seed), None
    days = cfg.lifesim.summary_days if cfg.agent.variant == "sum" else cfg.lifesim.horizon_days
    log = live_days(bundle.persona, days, root_seed, backend, bundle.emotional.state,
                    cfg.lifesim.base_engagement, cfg.lifesim.habit_multiplier,
                    load_library(cfg.lifesim.templates))
    if not log.engagements:
        audit.warn(f"agent={bundle.agent_id} never engaged in {days} days, using uniform times")
        return uniform_sessions(bundle.agent_id, count, days, root_seed), log
    picked = session_engagements(log, count, root_seed)
    if cfg.agent.variant == "sum":
        summary = summarize_contexts(list(log.contexts.values()), bundle.persona, backend, days,
                                     derive_seed(root_seed, "summary", bundle.agent_id))
        bundle.persona = bundle.persona.with_summary(summary.summary_text)
        return [(e, minimal_context(e.day_index, e.slot_index)) for e in picked], log
    return [(e, log.context_of(e)) for e in picked], log


def simulate_agent(persona: Persona, history: Sequence[InteractionRecord], catalog: Dict[str, Item],
                   env: RecEnv, cfg: RunConfig, backend: CompletionBackend,
                   interview: bool = False, round_index: int = 0) -> AgentRun:
    root_seed = derive_seed(cfg.seed, "agent", persona.agent_id)
    bundle = build_bundle(persona, history, catalog, cfg.memory.retrieval_weight)
    sessions, log = plan_sessions(bundle, cfg, backend, root_seed)
    run = AgentRun(bundle=bundle, life=log, engagements=[e for e, _ in sessions])
    exclusions = frozenset(r.item_id for r in bundle.history)
    mask = effective_mask(cfg)
    for index, (engagement, context) in enumerate(sessions):
        session_id = f"{persona.agent_id}-d{engagement.day_index}-s{engagement.slot_index:02d}-{index}"
        spec = SessionSpec(user_id=persona.agent_id, seed=derive_seed(root_seed, "session", index),
                           context=context, exclusions=exclusions, round_index=round_index,
                           own_ratings=bundle.own_ratings())
        trajectory = run_session(bundle, env, spec, cfg.agent, backend, session_id,
                                 cfg.memory.evidence_k, mask)
        run.trajectories.append(trajectory)
        if interview and trajectory.complete:
            try:
                run.interviews.append(post_interview(bundle.persona, trajectory, backend,
                                                     bundle.emotional.state.satisfaction,
                                                     derive_seed(root_seed, "interview", index)))
            except InterviewFailure as e:
                audit.warn(f"agent={persona.agent_id} interview failed: {e}")
    return run


def run_population(personas: Sequence[Persona], histories: Dict[str, List[InteractionRecord]],
                   catalog: Dict[str, Item], env_for: Callable[[str], RecEnv], cfg: RunConfig,
                   backend: CompletionBackend, interview: bool = False,
                   round_index: int = 0) -> List[AgentRun]:
    """Simulate every persona in parallel; results come back in agent-id order."""
    ordered = sorted(personas, key=lambda p: id_sort_key(p.agent_id))

    def one(persona: Persona) -> AgentRun:
        return simulate_agent(persona, histories.get(persona.agent_id, []), catalog,
                              env_for(persona.agent_id), cfg, backend, interview, round_index)

    with ThreadPoolExecutor(max_workers=cfg.worker_count()) as pool:
        return list(pool.map(one, ordered))
