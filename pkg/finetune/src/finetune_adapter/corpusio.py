"""Readers for the pipeline's corpus file formats.

The canonical corpus (JSONL) supplies document ids and order; the
token-table file (TOKEN<TAB>TAG lines, blank line between documents)
supplies the pipeline's exact token segmentation plus gold BIO tags.
`acdkit convert --to token-table` produces the latter from the former,
so the encoder baseline never re-implements tokenization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

BIO_TAGS = ("B-Claim", "I-Claim", "B-Premise", "I-Premise", "O")


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: str
    tokens: tuple[str, ...]
    tags: tuple[str, ...]


def read_canonical_ids(path: str | Path) -> list[str]:
    ids: list[str] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                ids.append(json.loads(line)["id"])
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
    return ids


def read_token_table_blocks(path: str | Path) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    blocks: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    tokens: list[str] = []
    tags: list[str] = []

    def flush() -> None:
        if tokens:
            blocks.append((tuple(tokens), tuple(tags)))
            tokens.clear()
            tags.clear()

    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected TOKEN<TAB>TAG, got {line!r}"
                )
            if fields[1] not in BIO_TAGS:
                raise CorpusFormatError(f"{path}:{lineno}: unknown tag {fields[1]!r}")
            tokens.append(fields[0])
            tags.append(fields[1])
    flush()
    return blocks


def read_tokenized_corpus(
    canonical_path: str | Path, token_table_path: str | Path
) -> list[TokenizedDocument]:
    """Zip the two views of one corpus; both must come from the same file."""
    ids = read_canonical_ids(canonical_path)
    blocks = read_token_table_blocks(token_table_path)
    if len(ids) != len(blocks):
        raise CorpusFormatError(
            f"{canonical_path} has {len(ids)} documents but "
            f"{token_table_path} has {len(blocks)} blocks"
        )
    return [
        TokenizedDocument(doc_id=doc_id, tokens=tokens, tags=tags)
        for doc_id, (tokens, tags) in zip(ids, blocks)
    ]
