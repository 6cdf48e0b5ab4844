"""Exception types shared across the package."""

from __future__ import annotations


class NormkitError(Exception):
    """Base class for all errors raised by normkit."""


class SortError(NormkitError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class GroundingError(NormkitError):
    pass


class ResourceLimitError(NormkitError):
    pass


class CompletionError(GroundingError):
    """Raised when the one-action-per-effect hypothesis does not hold."""

    def __init__(self, effect, producers):
        names = ", ".join(str(p) for p in producers)
        super().__init__(f"effect {effect} has several producing actions: {names}")
        self.effect = effect
        self.producers = tuple(producers)


class InconsistentFacts(NormkitError):
    def __init__(self, report):
        super().__init__(f"facts are inconsistent: {report}")
        self.report = report


class NoExtension(NormkitError):
    def __init__(self, trace):
        super().__init__("the default theory has no extension reachable by the search")
        self.trace = trace


class NotFound(NormkitError):
    pass


class DslError(NormkitError):
    """Carries the diagnostics produced while reading a source file."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "invalid source")
