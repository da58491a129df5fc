"""Canonical document model: tokens, component spans, labeled documents.

All span coordinates come in two currencies:
  - token indices (inclusive start/end) on ComponentSpan, and
  - character offsets (exclusive end) on CharSpan and Token.
Character offsets are the interchange currency because they survive
tokenizer changes; token indices are the evaluation currency.

Everything here is immutable after construction and validated in
__post_init__, so documents are safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Sequence

from acdkit.errors import DataError, SpanRangeError


class ComponentType(str, enum.Enum):
    """The two argumentative component kinds."""

    CLAIM = "Claim"
    PREMISE = "Premise"

    def __str__(self) -> str:  # keep file formats readable
        return self.value


class SourceCorpus(str, enum.Enum):
    """Origin of a document; Synthetic covers generated fixtures."""

    USELECDEB = "USElecDeb60To16"
    PERSUASIVE_ESSAYS = "PersuasiveEssays"
    WEB_DISCOURSE = "WebDiscourse"
    SYNTHETIC = "Synthetic"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Token:
    """One token with its character extent in the document text.

    Invariants: char_start < char_end and the document slice equals text
    (checked jointly by LabeledDocument).
    """

    text: str
    char_start: int
    char_end: int

    def __post_init__(self) -> None:
        if not self.text:
            raise DataError("token text cannot be empty")
        if self.char_start < 0 or self.char_end <= self.char_start:
            raise DataError(
                f"bad token extent [{self.char_start}, {self.char_end})"
            )
        if self.char_end - self.char_start != len(self.text):
            raise DataError(
                f"token extent [{self.char_start}, {self.char_end}) does not "
                f"cover {self.text!r}"
            )


@dataclass(frozen=True, slots=True)
class ComponentSpan:
    """Typed span over token indices; end_token is inclusive."""

    start_token: int
    end_token: int
    kind: ComponentType

    def __post_init__(self) -> None:
        if self.start_token < 0 or self.end_token < self.start_token:
            raise DataError(
                f"bad span token range [{self.start_token}, {self.end_token}]"
            )

    @property
    def token_count(self) -> int:
        return self.end_token - self.start_token + 1


@dataclass(frozen=True, slots=True)
class CharSpan:
    """Typed span over character offsets; end_char is exclusive.

    Zero-length spans are allowed: a lenient tagged-text parse can
    legitimately produce an empty component, which only disappears once
    converted to token spans.
    """

    start_char: int
    end_char: int
    kind: ComponentType

    def __post_init__(self) -> None:
        if self.start_char < 0 or self.end_char < self.start_char:
            raise DataError(
                f"bad span char range [{self.start_char}, {self.end_char})"
            )


@dataclass(frozen=True)
class LabeledDocument:
    """Source text, its tokens, and non-overlapping typed component spans."""

    id: str
    source_corpus: SourceCorpus
    text: str
    tokens: tuple[Token, ...]
    spans: tuple[ComponentSpan, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("document id cannot be empty")
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "spans", tuple(self.spans))
        prev_end = 0
        for i, tok in enumerate(self.tokens):
            if tok.char_start < prev_end:
                raise DataError(
                    f"{self.id}: token {i} overlaps or precedes its predecessor"
                )
            if tok.char_end > len(self.text):
                raise DataError(f"{self.id}: token {i} extends past text end")
            if self.text[tok.char_start : tok.char_end] != tok.text:
                raise DataError(
                    f"{self.id}: token {i} text {tok.text!r} does not match "
                    f"document slice"
                )
            prev_end = tok.char_end
        prev_span_end = -1
        for span in self.spans:
            if span.end_token >= len(self.tokens):
                raise DataError(
                    f"{self.id}: span {span} exceeds token count {len(self.tokens)}"
                )
            if span.start_token <= prev_span_end:
                raise DataError(f"{self.id}: spans overlap or are unsorted at {span}")
            prev_span_end = span.end_token

    @property
    def token_texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def span_char_extent(self, span: ComponentSpan) -> tuple[int, int]:
        """Character extent covered by a token span."""
        return (
            self.tokens[span.start_token].char_start,
            self.tokens[span.end_token].char_end,
        )

    def char_spans(self) -> tuple[CharSpan, ...]:
        """All spans rendered in the character-offset currency."""
        return tuple(
            CharSpan(*self.span_char_extent(s), kind=s.kind) for s in self.spans
        )

    def with_id(self, new_id: str) -> "LabeledDocument":
        return replace(self, id=new_id)


def snap_char_range_to_tokens(
    tokens: Sequence[Token], start_char: int, end_char: int
) -> tuple[int, int, bool] | None:
    """Map a character range onto the tokens it touches.

    Returns (start_token, end_token, widened) with inclusive indices, or
    None when the range covers no token (e.g. pure whitespace). ``widened``
    is True when either boundary cut through a token and was pushed
    outward to the token boundary.
    """
    if end_char < start_char:
        raise SpanRangeError(f"span end {end_char} precedes start {start_char}")
    first = last = None
    for i, tok in enumerate(tokens):
        if tok.char_end > start_char and tok.char_start < end_char:
            if first is None:
                first = i
            last = i
        elif tok.char_start >= end_char:
            break
    if first is None or last is None:
        return None
    widened = tokens[first].char_start < start_char or tokens[last].char_end > end_char
    return first, last, widened
