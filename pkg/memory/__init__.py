"""Per-agent episodic and emotional memory."""

from memory.emotional import EmotionalMemory
from memory.episodic import EpisodicMemory, initial_records
