"""Ask-parse-retry loop shared by every model task."""

from typing import Callable, Optional, Type, TypeVar

import audit.logger as audit
from backend.base import CompletionBackend
from domain.errors import FieldMissing, MalformedAction, ParseFailure, SimulationError
from prompts.templates import PromptTemplate

T = TypeVar("T")

RECOVERABLE = (FieldMissing, MalformedAction, ParseFailure, ValueError)


def ask(backend: CompletionBackend, template: PromptTemplate, parse: Callable[[str], T],
        failure: Type[SimulationError], seed: Optional[int] = None, attempts: int = 2,
        correction: Optional[Callable[[Exception], str]] = None, **data) -> T:
    """
    Send ``template`` rendered with ``data`` and parse the reply.

    A reply ``parse`` rejects is retried up to ``attempts`` times in total.
    When the template has a ``{correction}`` slot, ``correction(error)`` fills
    it on the retries.

    Raises:
        failure: every attempt was rejected
    """
    if "correction" in template.fields():
        data.setdefault("correction", "")
    last = None
    for attempt in range(1, attempts + 1):
        response = backend.complete(template.request(seed=seed, **data))
        try:
            return parse(response.text)
        except RECOVERABLE as e:
            last = e
            if attempt < attempts:
                audit.retry(attempt, attempts, f"{template.task_tag}: {e}")
                if correction is not None and "correction" in data:
                    data["correction"] = correction(e)
    raise failure(f"{template.task_tag} reply rejected {attempts} times: {last}") from last
