"""Inline tag codec: document <-> text with <claim>/<premise> markers.

The dialect is exactly two tags. Matching on input is case-insensitive
and tolerates internal whitespace ("< Claim >"); output is canonical
lowercase. Anything else that looks like a tag ("<claims>", "<b>") is
literal text. No attributes, entities, or nesting — this is not XML,
just paired markers whose removal must reproduce the plain text byte for
byte.

decode_xml's lenient mode is total: any string parses, and every fix is
recorded as a Repair. Strict mode raises TagStructureError at the first
structurally broken tag. Span positions in a ParseOutcome are exact
character extents in the plain text; the token-level view re-tokenizes
and snaps outward, which can merge or drop degenerate spans without
affecting the character-level truth.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from acdkit.corpus.model import (
    CharSpan,
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
    snap_char_range_to_tokens,
)
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import DataError, TagStructureError

TAG_RE = re.compile(r"<\s*(/?)\s*(claim|premise)\s*>", re.IGNORECASE)

_OPEN = {
    ComponentType.CLAIM: "<claim>",
    ComponentType.PREMISE: "<premise>",
}
_CLOSE = {
    ComponentType.CLAIM: "</claim>",
    ComponentType.PREMISE: "</premise>",
}


class RepairKind(str, enum.Enum):
    """What the lenient parser had to fix."""

    UNCLOSED_OPEN = "unclosed_open"          # open tag ran to end of text
    UNOPENED_CLOSE = "unopened_close"        # close tag with nothing open
    MISMATCHED_CLOSE = "mismatched_close"    # close tag of the other kind
    NESTED_OPEN = "nested_open"              # open tag while one is open


@dataclass(frozen=True, slots=True)
class Repair:
    """kind plus the offending tag's character position in the input."""

    kind: RepairKind
    char_pos: int
    detail: str = ""


@dataclass(frozen=True, slots=True)
class TagEvent:
    """One recognized tag occurrence, uninterpreted."""

    kind: ComponentType
    closing: bool
    char_pos: int
    raw: str


@dataclass(frozen=True)
class ParseOutcome:
    """Plain text, recovered spans, and the repairs made to get them.

    char_spans are exact extents in plain_text; spans are the token-level
    view over tokenize(plain_text). repairs is empty iff the input was
    well-formed.
    """

    plain_text: str
    char_spans: tuple[CharSpan, ...]
    repairs: tuple[Repair, ...]
    spans: tuple[ComponentSpan, ...] = field(default=())

    def to_document(
        self,
        doc_id: str,
        source_corpus: SourceCorpus = SourceCorpus.SYNTHETIC,
    ) -> LabeledDocument:
        return LabeledDocument(
            id=doc_id,
            source_corpus=source_corpus,
            text=self.plain_text,
            tokens=tuple(tokenize(self.plain_text)),
            spans=self.spans,
        )


def tag_skeleton(tagged: str) -> list[TagEvent]:
    """Lex recognized tags without interpreting nesting. Never fails."""
    events: list[TagEvent] = []
    for m in TAG_RE.finditer(tagged):
        kind = (
            ComponentType.CLAIM
            if m.group(2).lower() == "claim"
            else ComponentType.PREMISE
        )
        events.append(
            TagEvent(kind=kind, closing=bool(m.group(1)), char_pos=m.start(), raw=m.group(0))
        )
    return events


def encode_char_spans(text: str, spans: list[CharSpan] | tuple[CharSpan, ...]) -> str:
    """Insert canonical tags at the given character extents."""
    parts: list[str] = []
    pos = 0
    for span in spans:
        if span.start_char < pos:
            raise DataError(f"overlapping or unsorted spans at char {span.start_char}")
        if span.end_char > len(text):
            raise DataError(f"span end {span.end_char} beyond text length")
        parts.append(text[pos : span.start_char])
        parts.append(_OPEN[span.kind])
        parts.append(text[span.start_char : span.end_char])
        parts.append(_CLOSE[span.kind])
        pos = span.end_char
    parts.append(text[pos:])
    return "".join(parts)


def encode_xml(doc: LabeledDocument) -> str:
    """Render a document as tagged text; text outside tags is byte-identical."""
    return encode_char_spans(doc.text, list(doc.char_spans()))


def strip_tags(tagged: str) -> str:
    """Remove all recognized tags, keeping everything else untouched."""
    return TAG_RE.sub("", tagged)


def decode_xml(tagged: str, mode: str = "lenient") -> ParseOutcome:
    """Parse tagged text back into plain text plus spans.

    Lenient repairs: an unclosed open tag closes at end of text, an
    unopened close tag is dropped, a nested open closes the currently
    open span at the conflict point, and a mismatched close closes the
    open span. All recognized tags are removed from the plain text either
    way; unknown tag-like substrings stay literal.
    """
    if mode not in ("lenient", "strict"):
        raise ValueError(f"mode must be 'lenient' or 'strict', got {mode!r}")
    strict = mode == "strict"

    events = tag_skeleton(tagged)
    plain_parts: list[str] = []
    consumed = 0  # position in tagged input
    removed = 0  # characters of tag markup dropped so far
    open_kind: ComponentType | None = None
    open_plain_pos = 0
    char_spans: list[CharSpan] = []
    repairs: list[Repair] = []

    for ev in events:
        plain_parts.append(tagged[consumed:ev.char_pos])
        plain_pos = ev.char_pos - removed
        if not ev.closing:
            if open_kind is None:
                open_kind, open_plain_pos = ev.kind, plain_pos
            else:
                if strict:
                    raise TagStructureError(
                        f"<{ev.kind.value.lower()}> opened while "
                        f"<{open_kind.value.lower()}> is open",
                        ev.char_pos,
                    )
                char_spans.append(CharSpan(open_plain_pos, plain_pos, open_kind))
                repairs.append(
                    Repair(
                        RepairKind.NESTED_OPEN,
                        ev.char_pos,
                        f"closed open <{open_kind.value.lower()}> before nested open",
                    )
                )
                open_kind, open_plain_pos = ev.kind, plain_pos
        else:
            if open_kind is None:
                if strict:
                    raise TagStructureError(
                        f"</{ev.kind.value.lower()}> with no open tag", ev.char_pos
                    )
                repairs.append(
                    Repair(
                        RepairKind.UNOPENED_CLOSE,
                        ev.char_pos,
                        f"dropped stray </{ev.kind.value.lower()}>",
                    )
                )
            elif open_kind is ev.kind:
                char_spans.append(CharSpan(open_plain_pos, plain_pos, open_kind))
                open_kind = None
            else:
                if strict:
                    raise TagStructureError(
                        f"</{ev.kind.value.lower()}> closes "
                        f"<{open_kind.value.lower()}>",
                        ev.char_pos,
                    )
                char_spans.append(CharSpan(open_plain_pos, plain_pos, open_kind))
                repairs.append(
                    Repair(
                        RepairKind.MISMATCHED_CLOSE,
                        ev.char_pos,
                        f"</{ev.kind.value.lower()}> closed open "
                        f"<{open_kind.value.lower()}>",
                    )
                )
                open_kind = None
        consumed = ev.char_pos + len(ev.raw)
        removed += len(ev.raw)

    plain_parts.append(tagged[consumed:])
    plain_text = "".join(plain_parts)

    if open_kind is not None:
        if strict:
            raise TagStructureError(
                f"<{open_kind.value.lower()}> never closed", len(tagged)
            )
        char_spans.append(CharSpan(open_plain_pos, len(plain_text), open_kind))
        repairs.append(
            Repair(
                RepairKind.UNCLOSED_OPEN,
                len(tagged),
                f"closed <{open_kind.value.lower()}> at end of text",
            )
        )

    token_spans = _char_spans_to_token_spans(plain_text, char_spans)
    return ParseOutcome(
        plain_text=plain_text,
        char_spans=tuple(char_spans),
        repairs=tuple(repairs),
        spans=tuple(token_spans),
    )


def _char_spans_to_token_spans(
    plain_text: str, char_spans: list[CharSpan]
) -> list[ComponentSpan]:
    tokens = tokenize(plain_text)
    out: list[ComponentSpan] = []
    prev_end = -1
    for span in char_spans:
        snapped = snap_char_range_to_tokens(tokens, span.start_char, span.end_char)
        if snapped is None:
            continue  # empty or whitespace-only span has no token view
        tok_start, tok_end, _ = snapped
        tok_start = max(tok_start, prev_end + 1)
        if tok_start > tok_end:
            continue
        out.append(ComponentSpan(tok_start, tok_end, span.kind))
        prev_end = tok_end
    return out
