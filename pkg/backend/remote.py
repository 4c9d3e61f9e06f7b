"""HTTP backend for any OpenAI-compatible chat-completions server.

Built on the groq SDK client with SDK-level retries disabled: retries,
backoff and the in-flight cap are handled here so each attempt is logged.
"""

import threading
import time
from typing import Callable, Optional, Sequence

import groq
import httpx

import audit.logger as audit
from backend.base import CompletionBackend, CompletionRequest, CompletionResponse
from domain.errors import BackendUnavailable, RemoteError, Timeout


def request_body(model: str, request: CompletionRequest) -> dict:
    """The JSON body sent for ``request``; prompts are passed through untouched."""
    body = {
        "model": model,
        "messages": [
            {"role": "system", "content": request.system_text},
            {"role": "user", "content": request.user_text},
        ],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    if request.seed is not None:
        body["seed"] = request.seed
    return body


def _is_transient(err: Exception) -> bool:
    if isinstance(err, (groq.APITimeoutError, groq.APIConnectionError)):
        return True
    if isinstance(err, groq.APIStatusError):
        return err.status_code == 429 or err.status_code >= 500
    return False


class RemoteBackend(CompletionBackend):
    """Chat-completions client with bounded retries and an in-flight cap."""

    name = "http"

    def __init__(self, base_url: str, model: str, api_key: Optional[str] = None,
                 path: str = "/chat/completions", timeout: float = 60.0,
                 max_attempts: int = 3, backoff: Sequence[float] = (0.5, 1.0, 2.0),
                 max_in_flight: int = 8, http_client: Optional[httpx.Client] = None,
                 sleep: Callable[[float], None] = time.sleep):
        if not api_key:
            audit.warn("no CONTEXTSIM_API_KEY set, sending placeholder key")
            api_key = "EMPTY"
        self.model = model
        self.path = "/" + path.lstrip("/")
        self.max_attempts = max(1, int(max_attempts))
        self.backoff = list(backoff) or [0.0]
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max(1, int(max_in_flight)))
        self.client = groq.Groq(api_key=api_key, base_url=base_url, timeout=timeout,
                                max_retries=0, http_client=http_client)

    def _post(self, body: dict) -> httpx.Response:
        with self._slots:
            return self.client.post(self.path, cast_to=httpx.Response, body=body)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        body = request_body(self.model, request)
        last_error = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self._post(body)
                text, tokens = self._read(response)
                audit.backend_call(self.name, request.task_tag, True)
                return CompletionResponse(text=text, token_estimate=tokens, backend_name=self.name)
            except groq.APIStatusError as e:
                if not _is_transient(e):
                    audit.backend_call(self.name, request.task_tag, False, f"status {e.status_code}")
                    raise RemoteError(e.status_code, _excerpt(e.response)) from e
                last_error = e
            except (groq.APITimeoutError, groq.APIConnectionError) as e:
                last_error = e
            if attempt < self.max_attempts:
                audit.retry(attempt, self.max_attempts, _describe(last_error))
                self._sleep(self.backoff[min(attempt - 1, len(self.backoff) - 1)])

        audit.backend_call(self.name, request.task_tag, False, _describe(last_error))
        if isinstance(last_error, groq.APITimeoutError) and self.max_attempts == 1:
            raise Timeout(str(last_error)) from last_error
        raise BackendUnavailable(
            f"{self.max_attempts} attempts failed: {_describe(last_error)}") from last_error

    @staticmethod
    def _read(response: httpx.Response):
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise RemoteError(response.status_code, f"unreadable body: {response.text[:200]}") from e
        if not text.strip():
            raise RemoteError(response.status_code, "empty completion")
        usage = data.get("usage") or {}
        tokens = usage.get("completion_tokens")
        if not isinstance(tokens, int) or tokens < 0:
            tokens = len(text.split())
        return text, tokens


def _excerpt(response) -> str:
    try:
        return response.text
    except Exception:
        return ""


def _describe(err: Optional[Exception]) -> str:
    if err is None:
        return "unknown error"
    if isinstance(err, groq.APIStatusError):
        return f"status {err.status_code}"
    return f"{type(err).__name__}: {err}"
