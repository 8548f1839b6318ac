"""Shared exception types and the diagnostic record used across the toolkit."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding attached to a model element or corpus entry.

    severity is "error" or "warning"; subject carries the id of the node,
    edge, or entry the finding is about (may be empty).
    """

    severity: str
    message: str
    subject: str = ""

    def __str__(self) -> str:
        if self.subject:
            return f"{self.severity}: {self.message} [{self.subject}]"
        return f"{self.severity}: {self.message}"


class ToolError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ToolError):
    """Malformed input document. Carries the 1-based line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class GraphValidationError(ToolError):
    """A graph violates a structural invariant. Carries the diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "invalid graph")


class UnknownIdError(ToolError):
    """An operation referenced a node, edge, vertex, or entry that does not exist."""


class EditError(ToolError):
    """A model or session mutation was rejected (duplicate add, absent attribute, ...)."""


class FormatError(ToolError):
    """An unsupported or corrupt serialization format was requested or read."""
