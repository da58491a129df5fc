"""Canonical interchange file: one JSON document record per line (UTF-8).

Record fields: id, source_corpus, text, spans:[{start_char, end_char,
kind}]. Spans use character offsets so files survive tokenizer changes;
reading re-tokenizes and snaps offsets to token boundaries (a warning is
logged if snapping actually widens anything, which only happens for files
produced by foreign tools).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Iterator

from acdkit.corpus.model import (
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
    snap_char_range_to_tokens,
)
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import DataError

logger = logging.getLogger(__name__)


def document_to_record(doc: LabeledDocument) -> dict:
    return {
        "id": doc.id,
        "source_corpus": doc.source_corpus.value,
        "text": doc.text,
        "spans": [
            {
                "start_char": doc.tokens[s.start_token].char_start,
                "end_char": doc.tokens[s.end_token].char_end,
                "kind": s.kind.value,
            }
            for s in doc.spans
        ],
    }


def record_to_document(record: dict) -> LabeledDocument:
    try:
        doc_id = record["id"]
        source = SourceCorpus(record["source_corpus"])
        text = record["text"]
        raw_spans = record["spans"]
    except (KeyError, ValueError) as exc:
        raise DataError(f"bad interchange record: {exc}") from None

    tokens = tokenize(text)
    spans: list[ComponentSpan] = []
    prev_end = -1
    for raw in sorted(raw_spans, key=lambda r: (r["start_char"], r["end_char"])):
        kind = ComponentType(raw["kind"])
        snapped = snap_char_range_to_tokens(tokens, raw["start_char"], raw["end_char"])
        if snapped is None:
            logger.warning("%s: span %s covers no token, dropped", doc_id, raw)
            continue
        tok_start, tok_end, widened = snapped
        if widened:
            logger.warning(
                "%s: span [%d, %d) snapped outward to token boundaries",
                doc_id,
                raw["start_char"],
                raw["end_char"],
            )
        if tok_start <= prev_end:
            raise DataError(f"{doc_id}: overlapping spans in interchange record")
        spans.append(ComponentSpan(tok_start, tok_end, kind))
        prev_end = tok_end
    return LabeledDocument(
        id=doc_id,
        source_corpus=source,
        text=text,
        tokens=tuple(tokens),
        spans=tuple(spans),
    )


def dumps_document(doc: LabeledDocument) -> str:
    return json.dumps(document_to_record(doc), ensure_ascii=False, sort_keys=True)


def write_corpus(docs: Iterable[LabeledDocument], path: str | Path) -> int:
    path = Path(path)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(dumps_document(doc) + "\n")
            n += 1
    return n


def iter_corpus(path: str | Path) -> Iterator[LabeledDocument]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            try:
                yield record_to_document(record)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None


def read_corpus(path: str | Path) -> list[LabeledDocument]:
    return list(iter_corpus(path))
