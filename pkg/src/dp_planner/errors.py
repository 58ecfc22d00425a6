"""Exception hierarchy shared across the engine and the HTTP service.

Every error carries a short machine-readable ``code`` and an optional
``field_path`` pointing at the offending input field, matching the wire
format the service uses for error bodies.
"""

from __future__ import annotations


class PlannerError(Exception):
    """Base class for all engine errors."""

    code = "internal"

    def __init__(self, message: str, field_path: str | None = None):
        super().__init__(message)
        self.message = message
        self.field_path = field_path


class DomainError(PlannerError, ValueError):
    """An argument is outside the mathematical domain of an operation."""

    code = "domain"


class IngestError(PlannerError):
    """A dataset file failed validation against its schema."""

    code = "ingest"


class SpecError(PlannerError):
    """A query spec does not validate against the dataset schema."""

    code = "invalid_spec"


class ConfigError(PlannerError):
    """A configuration value is unusable (e.g. too few bootstrap replicates)."""

    code = "config"


class StateError(PlannerError):
    """An operation is not permitted in the current state."""

    code = "state"


class FinalizedError(StateError):
    """The session is finalized and rejects further mutation."""

    code = "finalized"


class NotFoundError(PlannerError):
    """A referenced session, dataset, or query does not exist."""

    code = "not_found"
