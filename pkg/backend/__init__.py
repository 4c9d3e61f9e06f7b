"""Completion backends: scripted rules or a remote chat-completions server."""

from backend.base import TASK_TAGS, CompletionBackend, CompletionRequest, CompletionResponse
from backend.parsing import parse_tagged_field
from backend.scripted import ScriptedBackend


def make_backend(cfg, api_key=None, http_client=None) -> CompletionBackend:
    """Build the backend selected by a ``BackendConfig``."""
    if cfg.kind == "scripted":
        return ScriptedBackend(classify_rule=cfg.classify_rule)
    from backend.remote import RemoteBackend
    return RemoteBackend(base_url=cfg.base_url, model=cfg.model, api_key=api_key,
                         path=cfg.path, timeout=cfg.timeout, max_attempts=cfg.max_attempts,
                         backoff=cfg.backoff, max_in_flight=cfg.max_in_flight,
                         http_client=http_client)
