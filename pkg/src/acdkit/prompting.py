"""Prompt templates, sentence-aware chunking, and training-pair export.

Chunking packs whole sentences greedily up to a token budget. Sentences
that share a component span are fused into one unbreakable unit, which is
exactly the "move the boundary before the span's first sentence" rule: a
span can never straddle a chunk boundary. The budget counts this
toolkit's tokens, not any model tokenizer's subwords, so exports apply a
safety factor (default 0.6) to leave headroom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from acdkit.corpus.model import (
    CharSpan,
    ComponentSpan,
    LabeledDocument,
    Token,
)
from acdkit.errors import ChunkingError, DataError
from acdkit.tagcodec import encode_char_spans, strip_tags

INPUT_PLACEHOLDER = "{input_text}"
FORMAT_PLACEHOLDER = "{format_clause}"

DEFAULT_CHUNK_BUDGET = 1024
DEFAULT_SAFETY_FACTOR = 0.6
SENTENCE_ENDERS = ".!?"


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    """Instruction text with exactly one input placeholder."""

    instruction_text: str
    format_clause: str
    version_id: str

    def __post_init__(self) -> None:
        n = self.instruction_text.count(INPUT_PLACEHOLDER)
        if n != 1:
            raise DataError(
                f"template {self.version_id!r} must contain exactly one "
                f"{INPUT_PLACEHOLDER}, found {n}"
            )


DEFAULT_TEMPLATE = PromptTemplate(
    version_id="v1",
    format_clause=(
        "Wrap every claim in <claim>...</claim> and every premise in "
        "<premise>...</premise>; leave all remaining text outside any tag. "
        "A passage may contain several components or none."
    ),
    instruction_text=(
        "You mark argumentative components in text. A claim is a statement "
        "that asserts a contestable position, opinion, or proposition. A "
        "premise is a statement that gives justification, evidence, or "
        "reasoning for a claim or for another premise.\n"
        "Reproduce the input text below exactly as written, word for word, "
        "changing nothing and adding nothing except tags. "
        f"{FORMAT_PLACEHOLDER}\n\n"
        "Input:\n{input_text}\n\n"
        "Output:\n"
    ),
)

TEMPLATES: dict[str, PromptTemplate] = {DEFAULT_TEMPLATE.version_id: DEFAULT_TEMPLATE}


def get_template(version_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[version_id]
    except KeyError:
        raise DataError(
            f"unknown template version {version_id!r}; "
            f"known: {sorted(TEMPLATES)}"
        ) from None


@dataclass(frozen=True, slots=True)
class Chunk:
    """A contiguous token range of one document; both ends inclusive."""

    doc_id: str
    index: int
    token_start: int
    token_end: int
    char_start: int
    char_end: int
    text: str

    @property
    def token_count(self) -> int:
        return self.token_end - self.token_start + 1


@dataclass(frozen=True, slots=True)
class TrainingPair:
    """(rendered instruction, plain chunk, tagged chunk) for tuning."""

    doc_id: str
    chunk_index: int
    instruction: str
    input: str
    target: str
    template_version: str

    def __post_init__(self) -> None:
        if strip_tags(self.target) != self.input:
            raise DataError(
                f"{self.doc_id}#{self.chunk_index}: stripping the target does "
                "not reproduce the input"
            )


def sentence_token_ranges(doc: LabeledDocument) -> list[tuple[int, int]]:
    """Token index ranges (inclusive) of sentences.

    A sentence ends at a {. ! ?} character followed by whitespace or end
    of text; the trailing remainder forms the last sentence.
    """
    text = doc.text
    boundary_chars = {
        i
        for i, ch in enumerate(text)
        if ch in SENTENCE_ENDERS and (i + 1 == len(text) or text[i + 1].isspace())
    }
    ranges: list[tuple[int, int]] = []
    start = 0
    for i, tok in enumerate(doc.tokens):
        if (tok.char_end - 1) in boundary_chars:
            ranges.append((start, i))
            start = i + 1
    if start < len(doc.tokens):
        ranges.append((start, len(doc.tokens) - 1))
    return ranges


def _fuse_span_units(
    ranges: list[tuple[int, int]], spans: Sequence[ComponentSpan]
) -> list[tuple[int, int]]:
    """Merge consecutive sentences that share a span into single units."""
    if not ranges:
        return []
    units = [list(r) for r in ranges]
    for span in spans:
        first = last = None
        for i, (s, e) in enumerate(units):
            if e >= span.start_token and s <= span.end_token:
                if first is None:
                    first = i
                last = i
        if first is not None and last is not None and last > first:
            units[first][1] = units[last][1]
            del units[first + 1 : last + 1]
    return [(s, e) for s, e in units]


def chunk_document(
    doc: LabeledDocument, budget: int = DEFAULT_CHUNK_BUDGET
) -> list[Chunk]:
    """Greedily pack sentence units into chunks of at most ``budget`` tokens."""
    if budget < 1:
        raise ChunkingError(f"budget must be positive, got {budget}")
    for span in doc.spans:
        if span.token_count > budget:
            raise ChunkingError(
                f"{doc.id}: span of {span.token_count} tokens at token "
                f"{span.start_token} exceeds budget {budget}"
            )
    units = _fuse_span_units(sentence_token_ranges(doc), doc.spans)
    chunks: list[Chunk] = []
    cur_start: int | None = None
    cur_end = -1

    def close() -> None:
        nonlocal cur_start
        if cur_start is None:
            return
        first, last = doc.tokens[cur_start], doc.tokens[cur_end]
        chunks.append(
            Chunk(
                doc_id=doc.id,
                index=len(chunks),
                token_start=cur_start,
                token_end=cur_end,
                char_start=first.char_start,
                char_end=last.char_end,
                text=doc.text[first.char_start : last.char_end],
            )
        )
        cur_start = None

    for s, e in units:
        size = e - s + 1
        if size > budget:
            raise ChunkingError(
                f"{doc.id}: sentence group of {size} tokens at char "
                f"{doc.tokens[s].char_start} exceeds budget {budget}"
            )
        if cur_start is not None and (e - cur_start + 1) > budget:
            close()
        if cur_start is None:
            cur_start = s
        cur_end = e
    close()
    return chunks


def chunk_tokens(doc: LabeledDocument, chunk: Chunk) -> list[Token]:
    """Chunk-local tokens with offsets rebased to the chunk text."""
    return [
        Token(t.text, t.char_start - chunk.char_start, t.char_end - chunk.char_start)
        for t in doc.tokens[chunk.token_start : chunk.token_end + 1]
    ]


def chunk_spans(doc: LabeledDocument, chunk: Chunk) -> list[ComponentSpan]:
    """Gold spans falling inside the chunk, rebased to chunk-local indices."""
    out: list[ComponentSpan] = []
    for span in doc.spans:
        if span.start_token >= chunk.token_start and span.end_token <= chunk.token_end:
            out.append(
                ComponentSpan(
                    span.start_token - chunk.token_start,
                    span.end_token - chunk.token_start,
                    span.kind,
                )
            )
        elif span.start_token <= chunk.token_end and span.end_token >= chunk.token_start:
            raise DataError(
                f"{doc.id}: span {span} crosses chunk {chunk.index} boundary"
            )
    return out


def chunk_char_spans(doc: LabeledDocument, chunk: Chunk) -> list[CharSpan]:
    """Gold spans of the chunk in chunk-local character offsets."""
    tokens = chunk_tokens(doc, chunk)
    return [
        CharSpan(
            tokens[span.start_token].char_start,
            tokens[span.end_token].char_end,
            span.kind,
        )
        for span in chunk_spans(doc, chunk)
    ]


def encode_chunk(doc: LabeledDocument, chunk: Chunk) -> str:
    """Tagged text of one chunk (the training target)."""
    return encode_char_spans(chunk.text, chunk_char_spans(doc, chunk))


def render_prompt(template: PromptTemplate, chunk: Chunk | str) -> str:
    """Substitute the placeholders; the chunk text appears verbatim."""
    text = chunk.text if isinstance(chunk, Chunk) else chunk
    rendered = template.instruction_text.replace(
        FORMAT_PLACEHOLDER, template.format_clause
    )
    return rendered.replace(INPUT_PLACEHOLDER, text)


def effective_budget(budget: int, safety_factor: float) -> int:
    if not 0 < safety_factor <= 1:
        raise DataError(f"safety factor must be in (0, 1], got {safety_factor}")
    return max(1, int(budget * safety_factor))


def export_training_pairs(
    corpus: Sequence[LabeledDocument],
    template: PromptTemplate = DEFAULT_TEMPLATE,
    budget: int = DEFAULT_CHUNK_BUDGET,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
) -> list[TrainingPair]:
    """One (instruction, plain, tagged) pair per chunk of every document."""
    pairs: list[TrainingPair] = []
    eff = effective_budget(budget, safety_factor)
    for doc in corpus:
        for chunk in chunk_document(doc, eff):
            pairs.append(
                TrainingPair(
                    doc_id=doc.id,
                    chunk_index=chunk.index,
                    instruction=render_prompt(template, chunk),
                    input=chunk.text,
                    target=encode_chunk(doc, chunk),
                    template_version=template.version_id,
                )
            )
    return pairs


def write_pairs(pairs: Iterable[TrainingPair], path: str | Path) -> int:
    path = Path(path)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(
                json.dumps(
                    {
                        "doc_id": pair.doc_id,
                        "chunk_index": pair.chunk_index,
                        "instruction": pair.instruction,
                        "input": pair.input,
                        "target": pair.target,
                        "template_version": pair.template_version,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
            n += 1
    return n


def read_pairs(path: str | Path) -> list[TrainingPair]:
    pairs: list[TrainingPair] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                pairs.append(
                    TrainingPair(
                        doc_id=record["doc_id"],
                        chunk_index=record["chunk_index"],
                        instruction=record["instruction"],
                        input=record["input"],
                        target=record["target"],
                        template_version=record["template_version"],
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError(f"{path}:{lineno}: bad training pair: {exc}") from None
    return pairs
