"""BIO tag scheme: expansion of spans to tags and parsing of tags to spans.

The tag set is closed: O, B-Claim, I-Claim, B-Premise, I-Premise. A
sequence is valid iff every I-x follows a B-x or I-x of the same x.
Parsing supports a lenient mode (standard repair: orphan I-x becomes B-x)
and a strict mode that rejects violations.
"""

from __future__ import annotations

from dataclasses import dataclass

from acdkit.corpus.model import ComponentSpan, ComponentType
from acdkit.errors import BioSchemeError

O_TAG = "O"

BIO_TAGS: tuple[str, ...] = ("B-Claim", "I-Claim", "B-Premise", "I-Premise", O_TAG)

# Table layout order used by human reports: claim pair, premise pair, O.
CLASS_ORDER: tuple[str, ...] = BIO_TAGS

_KIND_BY_NAME = {kind.value: kind for kind in ComponentType}


def begin_tag(kind: ComponentType) -> str:
    return f"B-{kind.value}"


def inside_tag(kind: ComponentType) -> str:
    return f"I-{kind.value}"


@dataclass(frozen=True, slots=True)
class BioRepair:
    """Record of a lenient fix: orphan I-x promoted to B-x."""

    token_index: int
    original: str
    repaired: str


def spans_to_bio(n_tokens: int, spans: tuple[ComponentSpan, ...] | list[ComponentSpan]) -> list[str]:
    """Expand sorted, non-overlapping spans to one tag per token."""
    tags = [O_TAG] * n_tokens
    for span in spans:
        if span.end_token >= n_tokens:
            raise BioSchemeError(
                f"span {span} exceeds token count {n_tokens}"
            )
        tags[span.start_token] = begin_tag(span.kind)
        for i in range(span.start_token + 1, span.end_token + 1):
            tags[i] = inside_tag(span.kind)
    return tags


def parse_tag(tag: str) -> tuple[str, ComponentType | None]:
    """Split a tag into its prefix ('O', 'B' or 'I') and component kind."""
    if tag == O_TAG:
        return O_TAG, None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        kind = _KIND_BY_NAME.get(tag[2:])
        if kind is not None:
            return tag[0], kind
    raise BioSchemeError(f"unknown BIO tag {tag!r}")


def bio_to_spans(
    tags: list[str] | tuple[str, ...], *, strict: bool = False
) -> tuple[list[ComponentSpan], list[BioRepair]]:
    """Parse a tag sequence into spans.

    In lenient mode (default) an I-x with no open B-x/I-x of the same kind
    starts a new span and is recorded as a repair; strict mode raises.
    """
    spans: list[ComponentSpan] = []
    repairs: list[BioRepair] = []
    open_start: int | None = None
    open_kind: ComponentType | None = None

    def close(upto: int) -> None:
        nonlocal open_start, open_kind
        if open_start is not None and open_kind is not None:
            spans.append(ComponentSpan(open_start, upto, open_kind))
        open_start, open_kind = None, None

    for i, tag in enumerate(tags):
        prefix, kind = parse_tag(tag)
        if prefix == O_TAG:
            close(i - 1)
        elif prefix == "B":
            close(i - 1)
            open_start, open_kind = i, kind
        else:  # I-x
            if open_kind is kind and open_start is not None:
                continue
            if strict:
                raise BioSchemeError(
                    f"I-{kind} at token {i} without preceding B-{kind}/I-{kind}"
                )
            repairs.append(BioRepair(i, tag, begin_tag(kind)))
            close(i - 1)
            open_start, open_kind = i, kind
    close(len(tags) - 1)
    return spans, repairs


def is_valid_bio(tags: list[str] | tuple[str, ...]) -> bool:
    try:
        _, repairs = bio_to_spans(tags, strict=True)
    except BioSchemeError:
        return False
    return not repairs
