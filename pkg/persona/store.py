"""Line-JSON persona store keyed by agent_id."""

import os
from typing import Dict, Iterable

from domain.codec import dump_jsonl, from_dict, iter_jsonl
from domain.types import Persona, id_sort_key


def save_personas(personas: Iterable[Persona], path: str) -> int:
    return dump_jsonl(sorted(personas, key=lambda p: id_sort_key(p.agent_id)), path)


def load_personas(path: str) -> Dict[str, Persona]:
    if not os.path.exists(path):
        return {}
    personas = {}
    for row in iter_jsonl(path):
        persona = from_dict(Persona, row)
        personas[persona.agent_id] = persona
    return personas
