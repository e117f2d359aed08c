"""
practices/exceptions.py

Error types raised by the knowledge-base engine. Rule violations found by the
validator are data (see ``validators.Violation``), not exceptions.
"""
from django.core.exceptions import ObjectDoesNotExist


class SopraError(Exception):
    """Base class for every engine failure."""


class UnknownReference(SopraError, ObjectDoesNotExist):
    """An id that does not name a declared entity of the expected kind."""

    def __init__(self, kind, id):
        self.kind = kind
        self.id   = id
        super().__init__(f"unknown {kind}: {id!r}")


class PreconditionError(SopraError):
    """An operation was called on a knowledge base it cannot work on."""


class DecisionError(SopraError):
    pass


class ScenarioError(SopraError):
    """Raised by the scenario reader with every ParseError it collected."""

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0] if self.errors else None
        summary = f"{len(self.errors)} parse error(s)"
        if first is not None:
            summary += f"; first: {first}"
        super().__init__(summary)
