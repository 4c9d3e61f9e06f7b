#!/usr/bin/env python3
"""Compact audit logging for simulation runs.

One line per event: ``<timestamp> | <EVENT> | key=value ...``. Nothing is
written until ``configure`` points the log at a file (normally
``<run dir>/audit.log``).
"""

import os
import threading
from datetime import datetime
from typing import Optional

try:
    import psutil
    _HAS_PSUTIL = True
except ImportError:
    _HAS_PSUTIL = False

_LOG_FILE: Optional[str] = None
_LOCK = threading.Lock()
_start_times = {}


def configure(path: Optional[str]):
    """Direct subsequent events to ``path`` (``None`` disables logging)."""
    global _LOG_FILE
    _LOG_FILE = path
    if path:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)


def log_path() -> Optional[str]:
    return _LOG_FILE


def _ts():
    """Return compact timestamp."""
    return datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]


def _write(event, msg=""):
    """Write a single log line."""
    if not _LOG_FILE:
        return
    line = f"{_ts()} | {event:<12} | {msg}\n"
    with _LOCK:
        with open(_LOG_FILE, "a", encoding="utf-8") as f:
            f.write(line)


def _mark(key):
    with _LOCK:
        _start_times[key] = datetime.now()


def _elapsed(key):
    with _LOCK:
        started = _start_times.pop(key, None)
    if started is None:
        return ""
    return f" elapsed={(datetime.now() - started).total_seconds():.2f}s"


def _quote(text) -> str:
    return str(text).replace("\"", "'").replace("\n", " ")[:200]


def run_start(command, out_dir=None):
    """Log run start."""
    _mark("run")
    _write("RUN", f"START command={command} out={out_dir}")


def run_end(success):
    """Log run end with total time."""
    _write("RUN", f"END success={success}{_elapsed('run')}")


def stage_start(stage):
    _mark(f"stage_{stage}")
    _write("STAGE", f"START stage={stage}")


def stage_end(stage, success=True, error=None, **counts):
    """Log stage end; ``counts`` become key=value pairs."""
    elapsed = _elapsed(f"stage_{stage}")
    extra = "".join(f" {k}={v}" for k, v in counts.items())
    if success:
        _write("STAGE", f"OK stage={stage}{extra}{elapsed}")
    else:
        _write("STAGE", f"FAIL stage={stage} error=\"{_quote(error)}\"{elapsed}")
    resource_snapshot(stage)


def session_start(agent_id, session_id):
    _mark(f"session_{session_id}")
    _write("SESSION", f"START agent={agent_id} session={session_id}")


def session_end(agent_id, session_id, outcome, steps, forced=False, complete=True):
    """Log session end with its outcome."""
    elapsed = _elapsed(f"session_{session_id}")
    _write("SESSION", f"END agent={agent_id} session={session_id} outcome={outcome} "
                      f"steps={steps} forced={forced} complete={complete}{elapsed}")


def backend_call(backend, task_tag, success, error=None):
    """Log one completion call."""
    if success:
        _write("BACKEND", f"OK backend={backend} task={task_tag}")
    else:
        _write("BACKEND", f"FAIL backend={backend} task={task_tag} error=\"{_quote(error)}\"")


def warn(msg):
    """Log a recoverable problem."""
    _write("WARN", msg)


def error(msg):
    """Log an error."""
    _write("ERROR", msg)


def retry(attempt, max_attempts, error_msg):
    """Log a retry attempt."""
    _write("RETRY", f"attempt={attempt}/{max_attempts} error=\"{_quote(error_msg)}\"")


def resource_snapshot(context=""):
    """Log current CPU and memory usage."""
    if not _HAS_PSUTIL or not _LOG_FILE:
        return
    try:
        process = psutil.Process(os.getpid())
        cpu = psutil.cpu_percent(interval=None)  # Non-blocking
        mem_mb = process.memory_info().rss / (1024 * 1024)
        _write("RESOURCE", f"cpu={cpu:.1f}% mem={mem_mb:.1f}MB context={context}")
    except Exception:
        pass


class AuditLog:
    """Context manager wrapping one CLI run."""

    def __init__(self, command, out_dir=None):
        self.command = command
        self.out_dir = out_dir
        self.success = False

    def __enter__(self):
        run_start(self.command, self.out_dir)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type:
            error(f"{exc_type.__name__}: {_quote(exc_val)}")
            self.success = False
        run_end(self.success)
        return False
