"""Errors shared by the file-format parsers."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed artifact file. Carries the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
