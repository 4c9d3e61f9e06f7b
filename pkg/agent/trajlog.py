"""Trajectory logs: a session header line followed by one line per step."""

from typing import Iterable, List

from domain.codec import action_from_dict, dump_jsonl, from_dict, iter_jsonl, to_dict
from domain.types import ContextVector, Trajectory, TrajectoryStep


def trajectory_rows(trajectory: Trajectory) -> List[dict]:
    rows = [{
        "kind": "session", "agent_id": trajectory.agent_id, "session_id": trajectory.session_id,
        "context": to_dict(trajectory.context), "strategy": trajectory.strategy,
        "mode": trajectory.mode, "terminal_action": to_dict(trajectory.terminal_action),
        "forced_exit": trajectory.forced_exit, "complete": trajectory.complete,
        "steps": len(trajectory.steps),
    }]
    for index, step in enumerate(trajectory.steps):
        rows.append({"kind": "step", "session_id": trajectory.session_id, "index": index,
                     "state_digest": step.state_digest, "thought": step.thought,
                     "action": to_dict(step.action), "page_number": step.page_number})
    return rows


def write_trajectories(trajectories: Iterable[Trajectory], path: str) -> int:
    """Write every trajectory; returns the number of sessions written."""
    trajectories = list(trajectories)
    dump_jsonl((row for t in trajectories for row in trajectory_rows(t)), path)
    return len(trajectories)


def read_trajectories(path: str) -> List[Trajectory]:
    out: List[Trajectory] = []
    header = None
    steps: List[TrajectoryStep] = []

    def flush():
        if header is not None:
            context = header.get("context")
            out.append(Trajectory(
                agent_id=header["agent_id"], session_id=header["session_id"],
                context=from_dict(ContextVector, context) if context else None,
                steps=tuple(steps), terminal_action=action_from_dict(header["terminal_action"]),
                forced_exit=header.get("forced_exit", False), complete=header.get("complete", True),
                strategy=header.get("strategy", ""), mode=header.get("mode", "recommendation")))

    for row in iter_jsonl(path):
        if row.get("kind") == "session":
            flush()
            header, steps = row, []
        else:
            steps.append(TrajectoryStep(state_digest=row["state_digest"], thought=row.get("thought", ""),
                                        action=action_from_dict(row["action"]),
                                        page_number=row.get("page_number", 1)))
    flush()
    return out
