"""Corpus-level operations: statistics, merging, deterministic splits."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from acdkit.corpus.bio import BIO_TAGS, O_TAG, spans_to_bio
from acdkit.corpus.model import ComponentType, LabeledDocument
from acdkit.errors import DataError


@dataclass
class CorpusStats:
    """Per-tag token counts and per-type span counts for a document set."""

    tag_counts: dict[str, int] = field(
        default_factory=lambda: {tag: 0 for tag in BIO_TAGS}
    )
    span_counts: dict[str, int] = field(
        default_factory=lambda: {kind.value: 0 for kind in ComponentType}
    )
    n_documents: int = 0
    n_tokens: int = 0

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        merged = CorpusStats()
        merged.tag_counts = {
            tag: self.tag_counts[tag] + other.tag_counts[tag] for tag in BIO_TAGS
        }
        merged.span_counts = {
            kind: self.span_counts[kind] + other.span_counts[kind]
            for kind in self.span_counts
        }
        merged.n_documents = self.n_documents + other.n_documents
        merged.n_tokens = self.n_tokens + other.n_tokens
        return merged


def corpus_stats(corpus: Sequence[LabeledDocument]) -> CorpusStats:
    """Count BIO tags (by expanding spans over tokens) and spans per type."""
    stats = CorpusStats()
    for doc in corpus:
        stats.n_documents += 1
        stats.n_tokens += len(doc.tokens)
        tags = spans_to_bio(len(doc.tokens), doc.spans)
        for tag in tags:
            stats.tag_counts[tag] += 1
        for span in doc.spans:
            stats.span_counts[span.kind.value] += 1
    return stats


def stats_by_source(
    corpus: Sequence[LabeledDocument],
) -> dict[str, CorpusStats]:
    grouped: dict[str, list[LabeledDocument]] = {}
    for doc in corpus:
        grouped.setdefault(doc.source_corpus.value, []).append(doc)
    return {source: corpus_stats(docs) for source, docs in sorted(grouped.items())}


def merge_corpora(
    corpora: Sequence[Sequence[LabeledDocument]],
) -> list[LabeledDocument]:
    """Concatenate corpora, prefixing ids with the source corpus name."""
    merged: list[LabeledDocument] = []
    seen: set[str] = set()
    for corpus in corpora:
        for doc in corpus:
            new_id = f"{doc.source_corpus.value}/{doc.id}"
            if new_id in seen:
                raise DataError(f"id collision after prefixing: {new_id}")
            seen.add(new_id)
            merged.append(doc.with_id(new_id))
    return merged


def split_sizes(n: int, ratios: Sequence[float]) -> list[int]:
    """Floor each ratio share, then hand out the remainder by largest
    fractional part (ties broken by split index)."""
    floors = [int(n * r) for r in ratios]
    remainder = n - sum(floors)
    fractional = sorted(
        range(len(ratios)),
        key=lambda i: (-(n * ratios[i] - floors[i]), i),
    )
    for i in fractional[:remainder]:
        floors[i] += 1
    return floors


def split(
    corpus: Sequence[LabeledDocument],
    ratios: tuple[float, float, float],
    seed: int,
) -> tuple[list[LabeledDocument], list[LabeledDocument], list[LabeledDocument]]:
    """Deterministic document-level train/dev/test partition."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise DataError(f"ratios must be three positive fractions, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DataError(f"ratios must sum to 1, got {sum(ratios)}")
    if len(corpus) < 3:
        raise DataError(
            f"corpus of {len(corpus)} documents cannot fill three splits"
        )
    order = list(corpus)
    random.Random(seed).shuffle(order)
    n_train, n_dev, _ = split_sizes(len(order), ratios)
    return (
        order[:n_train],
        order[n_train : n_train + n_dev],
        order[n_train + n_dev :],
    )
