"""Exception hierarchy shared by every simulator package."""

from typing import Optional


class SimulationError(Exception):
    """Base class for all simulator failures."""


# ingest
class ParseFailure(SimulationError):
    pass


# persona
class EmptyHistory(SimulationError):
    pass


class PersonaParseFailure(SimulationError):
    pass


class ScoreFailure(SimulationError):
    pass


class NoCandidates(SimulationError):
    pass


# memory
class OrderViolation(SimulationError):
    pass


# lifesim
class ScheduleParseFailure(SimulationError):
    pass


class EmptyHorizon(SimulationError):
    pass


# env
class EmptyTraining(SimulationError):
    pass


class MalformedAction(SimulationError):
    pass


class InvalidTransition(SimulationError):
    pass


class SessionClosed(SimulationError):
    pass


class UnknownItem(SimulationError):
    pass


# agent
class AppraisalFailure(SimulationError):
    pass


class RatingFailure(SimulationError):
    pass


class ClassificationFailure(SimulationError):
    pass


class InterviewFailure(SimulationError):
    pass


# metrics
class ShapeError(SimulationError):
    pass


class Undefined(SimulationError):
    pass


class KeyMismatch(SimulationError):
    def __init__(self, missing_in_real, missing_in_sim):
        self.missing_in_real = sorted(missing_in_real)
        self.missing_in_sim = sorted(missing_in_sim)
        super().__init__(
            f"strategy keys differ: only in sim={self.missing_in_real} only in real={self.missing_in_sim}"
        )


class EmptyInput(SimulationError):
    pass


# cli / io
class ConfigError(SimulationError):
    pass


class IOFailure(SimulationError):
    pass


# backend
class FieldMissing(SimulationError):
    def __init__(self, field_name: str):
        self.field_name = field_name
        super().__init__(f"field {field_name} missing from model output")


class BackendError(SimulationError):
    """Base class for completion backend failures."""


class Timeout(BackendError):
    pass


class RemoteError(BackendError):
    def __init__(self, status: Optional[int], body_excerpt: str = ""):
        self.status = status
        self.body_excerpt = body_excerpt[:300]
        super().__init__(f"remote error status={status} body=\"{self.body_excerpt}\"")


class UnknownTaskTag(BackendError):
    pass


class BackendUnavailable(BackendError):
    pass
