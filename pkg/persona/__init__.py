"""Generate-then-score persona inference."""

from persona.inference import (PersonaCandidate, generate_candidates, infer_persona, parse_persona,
                               score_consistency, select_persona)
from persona.store import load_personas, save_personas
