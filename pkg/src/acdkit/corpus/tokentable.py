"""Token/tag table ingestion: two-column TSV, blank line between documents.

Document text is reconstructed by the detokenization policy (single space
between tokens, no space before closing punctuation), then BIO runs become
component spans. Lenient mode repairs orphan I-x tags to B-x and logs the
repair; strict mode rejects them.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from acdkit.corpus.bio import bio_to_spans, parse_tag
from acdkit.corpus.model import LabeledDocument, SourceCorpus
from acdkit.corpus.tokenizer import detokenize
from acdkit.errors import BioSchemeError, TokenTableParseError

logger = logging.getLogger(__name__)


def parse_token_table(
    rows: Sequence[tuple[str, str]],
    *,
    doc_id: str = "doc",
    source_corpus: SourceCorpus = SourceCorpus.SYNTHETIC,
    strict: bool = False,
) -> LabeledDocument:
    """Build a document from (token_text, bio_tag) rows."""
    texts: list[str] = []
    tags: list[str] = []
    for i, (token_text, tag) in enumerate(rows):
        if not token_text:
            raise TokenTableParseError(f"{doc_id}: empty token at row {i}")
        parse_tag(tag)  # closed tag set; raises BioSchemeError on junk
        texts.append(token_text)
        tags.append(tag)

    text, tokens = detokenize(texts)
    try:
        spans, repairs = bio_to_spans(tags, strict=strict)
    except BioSchemeError as exc:
        raise BioSchemeError(f"{doc_id}: {exc}") from None
    for repair in repairs:
        logger.warning(
            "%s: repaired %s to %s at token %d",
            doc_id,
            repair.original,
            repair.repaired,
            repair.token_index,
        )
    return LabeledDocument(
        id=doc_id,
        source_corpus=source_corpus,
        text=text,
        tokens=tuple(tokens),
        spans=tuple(spans),
    )


def parse_token_table_file(
    content: str,
    *,
    source_corpus: SourceCorpus = SourceCorpus.SYNTHETIC,
    id_prefix: str = "doc",
    strict: bool = False,
) -> list[LabeledDocument]:
    """Split a multi-document table file on blank lines and parse each block."""
    docs: list[LabeledDocument] = []
    rows: list[tuple[str, str]] = []

    def flush() -> None:
        if rows:
            docs.append(
                parse_token_table(
                    rows,
                    doc_id=f"{id_prefix}-{len(docs):04d}",
                    source_corpus=source_corpus,
                    strict=strict,
                )
            )
            rows.clear()

    for lineno, line in enumerate(content.splitlines(), 1):
        if not line.strip():
            flush()
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise TokenTableParseError(
                f"expected TOKEN<TAB>TAG, got {line!r}", lineno
            )
        try:
            parse_tag(fields[1])
        except BioSchemeError as exc:
            raise TokenTableParseError(str(exc), lineno) from None
        rows.append((fields[0], fields[1]))
    flush()
    return docs


def format_token_table(docs: Iterable[LabeledDocument]) -> str:
    """Render documents back to the two-column format (tests and exports)."""
    from acdkit.corpus.bio import spans_to_bio

    blocks: list[str] = []
    for doc in docs:
        tags = spans_to_bio(len(doc.tokens), doc.spans)
        blocks.append(
            "\n".join(f"{tok.text}\t{tag}" for tok, tag in zip(doc.tokens, tags))
        )
    return "\n\n".join(blocks) + ("\n" if blocks else "")
