"""Base API for completion backends."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

from domain.errors import UnknownTaskTag

TASK_TAGS = (
    "PERSONA", "SCORE", "APPRAISE", "INTERNAL", "ACT", "REFLECT", "RATE", "CLASSIFY",
    "SCHEDULE", "SUMMARIZE", "INTERVIEW", "THOUGHT_ID", "THOUGHT_TA", "GOAL",
)


@dataclass(frozen=True)
class CompletionRequest:
    system_text: str
    user_text: str
    task_tag: str
    temperature: float = 0.7
    max_tokens: int = 512
    seed: Optional[int] = None

    def __post_init__(self):
        if self.task_tag not in TASK_TAGS:
            raise UnknownTaskTag(f"unknown task tag: {self.task_tag}")
        first = self.user_text.split("\n", 1)[0].strip()
        if first != f"#TASK: {self.task_tag}":
            raise ValueError(f"user_text must start with '#TASK: {self.task_tag}'")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    token_estimate: int
    backend_name: str


class CompletionBackend(ABC):
    """Base class for everything that answers a CompletionRequest."""

    name: str = None

    @abstractmethod
    def complete(self, request: CompletionRequest) -> CompletionResponse:
        """
        Answer one request.

        Returns:
            CompletionResponse with non-empty text

        Raises:
            BackendError subclasses on transport or dispatch failure
        """
        pass

    def __repr__(self):
        return f"<{self.__class__.__name__}(name='{self.name}')>"


def task_tag_of(user_text: str) -> str:
    """Read the tag from the ``#TASK:`` first line of a prompt."""
    first = user_text.split("\n", 1)[0].strip()
    if not first.startswith("#TASK:"):
        raise UnknownTaskTag("prompt has no #TASK: line")
    return first[len("#TASK:"):].strip()
