"""Training records for the two rationale corpora."""

from dataclasses import dataclass
from typing import Optional, Tuple

from domain.actions import Action
from domain.types import ContextVector, Persona

TASKS = ("ID", "TA")


@dataclass(frozen=True)
class ThoughtInputs:
    state_digest: str
    action: Action
    persona: Persona
    history: Tuple[str, ...] = ()
    alternatives: Tuple[Action, ...] = ()
    context: Optional[ContextVector] = None
    item_id: Optional[str] = None
    rating: Optional[int] = None


@dataclass(frozen=True)
class ThoughtRecord:
    task: str
    agent_id: str
    inputs: ThoughtInputs
    target_rationale: str

    def problems(self):
        out = []
        if self.task not in TASKS:
            out.append(f"task {self.task!r}")
        if self.task == "TA" and not self.inputs.alternatives:
            out.append("TA record without alternatives")
        if not self.target_rationale.strip():
            out.append("empty rationale")
        return out
