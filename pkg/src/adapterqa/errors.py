"""Shared exception types.

Errors caused by bad user input (malformed tables, schema violations,
impossible budgets) derive from ``InputError`` and map to CLI exit code 2;
everything else is treated as an internal error (exit code 1).
"""


class AdapterQaError(Exception):
    """Base class for all toolkit errors."""


class InputError(AdapterQaError):
    """Invalid user-supplied data or configuration."""


class SchemaError(InputError):
    """A JSON document does not match the expected schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
