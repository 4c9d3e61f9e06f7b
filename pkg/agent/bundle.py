"""Everything one simulated user carries between sessions."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from domain.types import FACTORS, InteractionRecord, Item, Persona
from memory.emotional import EmotionalMemory
from memory.episodic import DEFAULT_WEIGHT, EpisodicMemory, initial_records


@dataclass
class AgentBundle:
    persona: Persona
    episodic: EpisodicMemory
    emotional: EmotionalMemory = field(default_factory=EmotionalMemory)
    history: List[InteractionRecord] = field(default_factory=list)

    @property
    def agent_id(self) -> str:
        return self.persona.agent_id

    def prompt_persona(self, mask: Sequence[str] = FACTORS) -> Persona:
        """Persona as shown in prompts; the context summary is hidden when no factor is."""
        return self.persona if mask else self.persona.with_summary(None)

    def own_ratings(self) -> Dict[str, int]:
        return {r.item_id: r.rating for r in self.history if r.rating is not None}


def build_bundle(persona: Persona, history: Sequence[InteractionRecord], catalog: Dict[str, Item],
                 weight: float = DEFAULT_WEIGHT, emotional: Optional[EmotionalMemory] = None) -> AgentBundle:
    """Bundle whose episodic memory starts with one record per training interaction."""
    ordered = sorted(history, key=lambda r: r.timestamp)
    memory = EpisodicMemory(persona.agent_id, initial_records(ordered, catalog), weight=weight)
    return AgentBundle(persona=persona, episodic=memory, emotional=emotional or EmotionalMemory(),
                       history=list(ordered))
