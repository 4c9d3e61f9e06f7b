"""Bounded affect of one agent."""

from typing import Dict, List, Optional, Tuple

from domain.types import EmotionalState


class EmotionalMemory:
    """Current emotional state plus the log of every applied update."""

    def __init__(self, state: Optional[EmotionalState] = None):
        self.state = state or EmotionalState()
        self.update_log: List[Tuple[int, Dict[str, float]]] = []

    def __repr__(self):
        s = self.state
        return (f"<EmotionalMemory(fatigue={s.fatigue:.2f}, satisfaction={s.satisfaction:.2f}, "
                f"curiosity={s.curiosity:.2f}, boredom={s.boredom:.2f})>")

    def update_emotion(self, deltas: Dict[str, float], step_index: int = 0) -> "EmotionalMemory":
        """Add ``deltas`` coordinate-wise; every coordinate stays in [0, 1]."""
        self.state = self.state.shifted(deltas)
        self.update_log.append((step_index, {k: float(v) for k, v in deltas.items()}))
        return self

    def set_levels(self, step_index: int = 0, **levels: float) -> "EmotionalMemory":
        """Move the named coordinates to absolute levels via a logged delta."""
        current = self.state.as_dict()
        return self.update_emotion({k: float(v) - current[k] for k, v in levels.items()}, step_index)
