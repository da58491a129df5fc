"""Exception hierarchy shared across the toolkit.

Exit-code mapping (see cli): ConfigError -> 1, data errors -> 2,
BackendError -> 3.
"""

from __future__ import annotations


class AcdError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AcdError):
    """Invalid run configuration or command usage."""


class DataError(AcdError):
    """Invalid corpus content, annotations, or derived data."""


class StandoffParseError(DataError):
    """Malformed standoff annotation line."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SpanRangeError(DataError):
    """Annotation offsets fall outside the document text."""


class TokenTableParseError(DataError):
    """Malformed token/tag table input."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class BioSchemeError(DataError):
    """BIO tag sequence violates the scheme in strict mode."""


class TagStructureError(DataError):
    """Strict tagged-text parse hit a malformation.

    ``char_pos`` is the offset of the offending tag in the tagged input.
    """

    def __init__(self, message: str, char_pos: int):
        self.char_pos = char_pos
        super().__init__(f"at char {char_pos}: {message}")


class ChunkingError(DataError):
    """A sentence or span cannot fit the chunk token budget."""


class BackendError(AcdError):
    """Completion backend failed after exhausting retries."""


class TranscriptError(DataError):
    """Transcript store content is unusable for the requested operation."""
