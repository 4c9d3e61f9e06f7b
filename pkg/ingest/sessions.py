"""Generic web-shopping session logs.

One JSON object per line::

    {"session_id": "s1", "user_id": "u1", "mode": "webshop",
     "steps": [{"state": {...SessionState...}, "action": {"type": "WebClick", ...}}, ...]}

``state`` uses the domain codec; the last step's action is the session outcome.
"""

from dataclasses import dataclass
from typing import List, Tuple

import audit.logger as audit
from domain.actions import Action
from domain.codec import action_from_dict, from_dict, iter_jsonl
from domain.errors import ParseFailure
from domain.types import SessionState


@dataclass(frozen=True)
class LoggedSession:
    session_id: str
    user_id: str
    mode: str
    steps: Tuple[Tuple[SessionState, Action], ...]


def load_sessions(path: str) -> List[LoggedSession]:
    sessions = []
    for row in iter_jsonl(path):
        try:
            steps = tuple((from_dict(SessionState, s["state"]), action_from_dict(s["action"]))
                          for s in row["steps"])
            sessions.append(LoggedSession(session_id=str(row["session_id"]),
                                          user_id=str(row["user_id"]),
                                          mode=row.get("mode", "webshop"), steps=steps))
        except (KeyError, TypeError, ParseFailure) as e:
            audit.warn(f"skipped session row: {e}")
    return sessions
