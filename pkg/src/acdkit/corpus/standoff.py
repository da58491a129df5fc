"""Standoff annotation ingestion (text file + annotation file pairs).

Text-bound annotation lines look like:

    T1<TAB>Claim 0 13<TAB>We should act

Only text-bound lines (id starting with "T") are read; relation,
attribute, event and note lines are structural metadata this toolkit does
not model and are skipped. Annotation types are mapped onto the two-way
claim/premise scheme; anything unmappable is dropped with a warning.
Character offsets that cut through a token are snapped outward to token
boundaries, also with a warning.
"""

from __future__ import annotations

import logging

from acdkit.corpus.model import (
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
    snap_char_range_to_tokens,
)
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import SpanRangeError, StandoffParseError

logger = logging.getLogger(__name__)

# Claim-like and premise-like annotation types found in released corpora.
CLAIM_TYPES = {"claim", "majorclaim", "major-claim", "major_claim"}
PREMISE_TYPES = {"premise", "evidence"}


def map_annotation_type(type_name: str) -> ComponentType | None:
    lowered = type_name.lower()
    if lowered in CLAIM_TYPES:
        return ComponentType.CLAIM
    if lowered in PREMISE_TYPES:
        return ComponentType.PREMISE
    return None


def parse_standoff(
    text_file_content: str,
    annotation_file_content: str,
    *,
    doc_id: str = "doc",
    source_corpus: SourceCorpus = SourceCorpus.SYNTHETIC,
) -> LabeledDocument:
    """Parse one text/annotation file pair into a LabeledDocument."""
    text = text_file_content
    tokens = tokenize(text)
    raw_spans: list[tuple[int, int, ComponentType]] = []

    for lineno, line in enumerate(annotation_file_content.splitlines(), 1):
        if not line.strip():
            continue
        if not line.startswith("T"):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise StandoffParseError(
                f"text-bound annotation needs at least id and type fields: {line!r}",
                lineno,
            )
        type_and_offsets = fields[1]
        surface = fields[2] if len(fields) > 2 else None

        head = type_and_offsets.split(" ", 1)
        if len(head) != 2:
            raise StandoffParseError(
                f"missing offsets in {type_and_offsets!r}", lineno
            )
        type_name, offset_part = head
        # Discontinuous fragments ("12 20;25 30") are bridged to their hull.
        fragments = offset_part.split(";")
        try:
            starts_ends = [
                (int(frag.split()[0]), int(frag.split()[1])) for frag in fragments
            ]
        except (ValueError, IndexError):
            raise StandoffParseError(
                f"unparseable offsets {offset_part!r}", lineno
            ) from None
        start = min(s for s, _ in starts_ends)
        end = max(e for _, e in starts_ends)
        if len(fragments) > 1:
            logger.warning(
                "%s line %d: discontinuous annotation bridged to [%d, %d)",
                doc_id,
                lineno,
                start,
                end,
            )
        if start < 0 or end > len(text) or end < start:
            raise SpanRangeError(
                f"{doc_id} line {lineno}: offsets [{start}, {end}) outside text "
                f"of length {len(text)}"
            )

        kind = map_annotation_type(type_name)
        if kind is None:
            logger.warning(
                "%s line %d: dropped annotation of unmapped type %r",
                doc_id,
                lineno,
                type_name,
            )
            continue
        if surface is not None and text[start:end] != surface:
            logger.warning(
                "%s line %d: surface text %r does not match offsets (using offsets)",
                doc_id,
                lineno,
                surface,
            )

        snapped = snap_char_range_to_tokens(tokens, start, end)
        if snapped is None:
            logger.warning(
                "%s line %d: annotation [%d, %d) covers no token, dropped",
                doc_id,
                lineno,
                start,
                end,
            )
            continue
        tok_start, tok_end, widened = snapped
        if widened:
            logger.warning(
                "%s line %d: offsets [%d, %d) cut a token, snapped to [%d, %d)",
                doc_id,
                lineno,
                start,
                end,
                tokens[tok_start].char_start,
                tokens[tok_end].char_end,
            )
        raw_spans.append((tok_start, tok_end, kind))

    raw_spans.sort(key=lambda s: (s[0], s[1]))
    spans: list[ComponentSpan] = []
    prev_end = -1
    for tok_start, tok_end, kind in raw_spans:
        if tok_start <= prev_end:
            logger.warning(
                "%s: span over tokens [%d, %d] overlaps a previous span, dropped",
                doc_id,
                tok_start,
                tok_end,
            )
            continue
        spans.append(ComponentSpan(tok_start, tok_end, kind))
        prev_end = tok_end

    return LabeledDocument(
        id=doc_id,
        source_corpus=source_corpus,
        text=text,
        tokens=tuple(tokens),
        spans=tuple(spans),
    )
