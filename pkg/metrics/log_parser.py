#!/usr/bin/env python3
"""Parser for simulation audit logs."""

import os
import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional


@dataclass
class ResourceSnapshot:
    """Represents a resource usage snapshot."""
    cpu_percent: float
    memory_mb: float
    context: str
    timestamp: datetime


@dataclass
class StageRecord:
    stage: str
    success: bool
    elapsed_time: float
    counts: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class SessionRecord:
    """One simulated session as seen in the log."""
    agent_id: str
    session_id: str
    outcome: str = ""
    steps: int = 0
    forced: bool = False
    complete: bool = True
    elapsed_time: float = 0.0
    start_time: Optional[datetime] = None


@dataclass
class RetryAttempt:
    """Represents a retry attempt."""
    attempt: int
    max_attempts: int
    error: str
    timestamp: datetime


@dataclass
class RunExecution:
    """Represents one CLI run."""
    command: str
    out_dir: Optional[str]
    success: bool
    total_elapsed_time: float
    start_time: datetime
    end_time: Optional[datetime] = None
    stages: List[StageRecord] = field(default_factory=list)
    sessions: List[SessionRecord] = field(default_factory=list)
    backend_ok: int = 0
    backend_failed: int = 0
    retry_attempts: List[RetryAttempt] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    resource_snapshots: List[ResourceSnapshot] = field(default_factory=list)

    @property
    def forced_exits(self) -> int:
        return sum(1 for s in self.sessions if s.forced)


def _field(name: str, message: str) -> Optional[str]:
    match = re.search(rf'{name}=("[^"]*"|\S+)', message)
    if not match:
        return None
    return match.group(1).strip('"')


def _elapsed(message: str) -> float:
    match = re.search(r'elapsed=(\d+\.?\d*)s', message)
    return float(match.group(1)) if match else 0.0


class AuditLogParser:
    """Parser for audit logs written by ``audit.logger``."""

    TIMESTAMP_PATTERN = r'(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{3})'
    EVENT_PATTERN = rf'{TIMESTAMP_PATTERN} \| (\w+)\s+\| (.*)'
    STAGE_KEYS = ("stage", "error", "elapsed")

    def __init__(self, log_file: str = "runs/audit.log"):
        self.log_file = log_file
        self.runs: List[RunExecution] = []

    def parse(self) -> List[RunExecution]:
        """Parse the log file and return completed and unfinished runs in order."""
        if not os.path.exists(self.log_file):
            return []

        with open(self.log_file, 'r', encoding='utf-8') as f:
            lines = f.readlines()

        self.runs = []
        current: Optional[RunExecution] = None
        open_sessions: Dict[str, SessionRecord] = {}

        for line in lines:
            match = re.match(self.EVENT_PATTERN, line.rstrip("\n"))
            if not match:
                continue
            timestamp_str, event_type, message = match.groups()
            timestamp = datetime.strptime(timestamp_str, "%Y-%m-%d %H:%M:%S.%f")

            if event_type == "RUN":
                if message.startswith("START"):
                    current = RunExecution(command=_field("command", message) or "",
                                           out_dir=_field("out", message), success=False,
                                           total_elapsed_time=0.0, start_time=timestamp)
                    open_sessions = {}
                    self.runs.append(current)
                elif message.startswith("END") and current:
                    current.success = _field("success", message) == "True"
                    current.total_elapsed_time = _elapsed(message)
                    current.end_time = timestamp
                    current = None
                continue

            if current is None:
                continue

            if event_type == "STAGE" and not message.startswith("START"):
                counts = dict(re.findall(r'(\w+)=(\S+)', message))
                current.stages.append(StageRecord(
                    stage=_field("stage", message) or "",
                    success=message.startswith("OK"),
                    elapsed_time=_elapsed(message),
                    counts={k: v for k, v in counts.items() if k not in self.STAGE_KEYS},
                    error=_field("error", message)))

            elif event_type == "SESSION":
                session_id = _field("session", message) or ""
                if message.startswith("START"):
                    open_sessions[session_id] = SessionRecord(
                        agent_id=_field("agent", message) or "", session_id=session_id,
                        start_time=timestamp)
                elif message.startswith("END"):
                    record = open_sessions.pop(session_id, None) or SessionRecord(
                        agent_id=_field("agent", message) or "", session_id=session_id)
                    record.outcome = _field("outcome", message) or ""
                    record.steps = int(_field("steps", message) or 0)
                    record.forced = _field("forced", message) == "True"
                    record.complete = _field("complete", message) != "False"
                    record.elapsed_time = _elapsed(message)
                    current.sessions.append(record)

            elif event_type == "BACKEND":
                if message.startswith("OK"):
                    current.backend_ok += 1
                else:
                    current.backend_failed += 1

            elif event_type == "RETRY":
                attempt_match = re.search(r'attempt=(\d+)/(\d+)', message)
                if attempt_match:
                    current.retry_attempts.append(RetryAttempt(
                        attempt=int(attempt_match.group(1)),
                        max_attempts=int(attempt_match.group(2)),
                        error=_field("error", message) or "",
                        timestamp=timestamp))

            elif event_type == "WARN":
                current.warnings.append(message)

            elif event_type == "ERROR":
                current.errors.append(message)

            elif event_type == "RESOURCE":
                cpu_match = re.search(r'cpu=(\d+\.?\d*)%', message)
                mem_match = re.search(r'mem=(\d+\.?\d*)MB', message)
                if cpu_match and mem_match:
                    current.resource_snapshots.append(ResourceSnapshot(
                        cpu_percent=float(cpu_match.group(1)),
                        memory_mb=float(mem_match.group(1)),
                        context=_field("context", message) or "",
                        timestamp=timestamp))

        return self.runs

    def get_summary(self) -> Dict[str, Any]:
        """Get a summary of all parsed runs."""
        if not self.runs:
            self.parse()

        if not self.runs:
            return {"error": "No runs found in log"}

        total = len(self.runs)
        successful = sum(1 for r in self.runs if r.success)
        sessions = [s for r in self.runs for s in r.sessions]
        calls = sum(r.backend_ok + r.backend_failed for r in self.runs)

        return {
            "total_runs": total,
            "successful_runs": successful,
            "failed_runs": total - successful,
            "total_sessions": len(sessions),
            "forced_exits": sum(1 for s in sessions if s.forced),
            "incomplete_sessions": sum(1 for s in sessions if not s.complete),
            "backend_calls": calls,
            "backend_failures": sum(r.backend_failed for r in self.runs),
            "total_retries": sum(len(r.retry_attempts) for r in self.runs),
            "warnings": sum(len(r.warnings) for r in self.runs),
            "errors": sum(len(r.errors) for r in self.runs),
            "avg_session_steps": sum(s.steps for s in sessions) / len(sessions) if sessions else 0,
            "avg_run_time": sum(r.total_elapsed_time for r in self.runs) / total,
        }


def print_summary(summary: Dict[str, Any]):
    print("\n" + "=" * 70)
    print("AUDIT LOG SUMMARY")
    print("=" * 70)
    for key, value in summary.items():
        if isinstance(value, float):
            print(f"  {key + ':':<24} {value:.2f}")
        else:
            print(f"  {key + ':':<24} {value}")
    print("=" * 70)
