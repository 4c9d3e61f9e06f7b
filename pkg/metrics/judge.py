"""Prompts for an external model judge; nothing here scores anything."""

from typing import Dict, Iterable, List, Sequence

from domain.codec import dump_jsonl
from domain.errors import EmptyInput
from domain.types import Persona, Trajectory
from env.actions import render_action
from env.render import format_context
from prompts.blocks import persona_block

KINDS = ("human_likeness", "consistency", "context_consistency")

HUMAN_LIKENESS = """Please evaluate the following interactions of an agent with a recommender system, and determine whether it is generated by a Large Language Model (LLM) AI or a real human:
{logs}

Please rate on a scale of 1 to 5, with 1 being most like an AI and 5 being most like a human.
Reply with:
SCORE: <integer 1-5>"""

CONSISTENCY = """You are checking whether a user's stated rationale and action fit who they are.
## Persona
{persona}
## Observation
{observation}
## History
{history}
## Rationale
{rationale}
## Action
{action}

Label the (rationale, action) pair as coherent, partially coherent or contradictory
with respect to the persona and the situation.
Reply with:
LABEL: <coherent | partially coherent | contradictory>
REASON: <one sentence>"""

CONTEXT_CONSISTENCY = """You are checking whether a simulated daily-life situation is plausible for this user.
## Persona
{persona}
## Simulated context
{context}
## Reference
{reference}

For each dimension (temporal, spatial, situational, goal, constraint) label the simulated
context as aligned, partially aligned or contradictory.
Reply with one line per dimension:
TEMPORAL: <label>
SPATIAL: <label>
SITUATIONAL: <label>
GOAL: <label>
CONSTRAINT: <label>"""


def interaction_log(trajectory: Trajectory) -> str:
    lines = []
    for index, step in enumerate(trajectory.steps, 1):
        thought = f" ({step.thought})" if step.thought else ""
        lines.append(f"{index}. page {step.page_number}: {render_action(step.action)}{thought}")
    lines.append(f"session ended with {render_action(trajectory.terminal_action)}")
    return "\n".join(lines)


def human_likeness_prompts(trajectories: Sequence[Trajectory]) -> List[Dict[str, str]]:
    return [{"kind": "human_likeness", "sample_id": t.session_id,
             "prompt": HUMAN_LIKENESS.format(logs=interaction_log(t))} for t in trajectories]


def consistency_prompts(trajectories: Sequence[Trajectory], personas: Dict[str, Persona],
                        history_size: int = 5) -> List[Dict[str, str]]:
    """One prompt per step that carries a rationale."""
    out = []
    for t in trajectories:
        persona = personas.get(t.agent_id)
        if persona is None:
            continue
        done: List[str] = []
        for index, step in enumerate(t.steps):
            action = render_action(step.action)
            if step.thought:
                out.append({"kind": "consistency", "sample_id": f"{t.session_id}:{index}",
                            "prompt": CONSISTENCY.format(
                                persona=persona_block(persona), observation=step.state_digest,
                                history="\n".join(f"- {a}" for a in done[-history_size:]) or "- none",
                                rationale=step.thought, action=action)})
            done.append(action)
    return out


def context_consistency_prompts(trajectories: Sequence[Trajectory], personas: Dict[str, Persona],
                                references: Dict[str, str] = None) -> List[Dict[str, str]]:
    """One prompt per session with a context; ``references`` maps session ids to ground truth."""
    references = references or {}
    out = []
    for t in trajectories:
        persona = personas.get(t.agent_id)
        if persona is None or t.context is None:
            continue
        out.append({"kind": "context_consistency", "sample_id": t.session_id,
                    "prompt": CONTEXT_CONSISTENCY.format(
                        persona=persona_block(persona), context=format_context(t.context),
                        reference=references.get(t.session_id, "none provided"))})
    return out


def emit_judge_prompts(trajectories: Iterable[Trajectory], kind: str, path: str,
                       personas: Dict[str, Persona] = None,
                       references: Dict[str, str] = None) -> int:
    """
    Write one judge prompt per sample as line-JSON.

    Returns:
        number of prompts written

    Raises:
        EmptyInput: no trajectories, or no sample of the requested kind
        IOFailure: the file cannot be written
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    trajectories = list(trajectories)
    if not trajectories:
        raise EmptyInput("no trajectories to judge")
    personas = personas or {}
    if kind == "human_likeness":
        prompts = human_likeness_prompts(trajectories)
    elif kind == "consistency":
        prompts = consistency_prompts(trajectories, personas)
    else:
        prompts = context_consistency_prompts(trajectories, personas, references)
    if not prompts:
        raise EmptyInput(f"no samples for {kind}")
    return dump_jsonl(prompts, path)
