"""Seeded synthetic document generator shared by the test suite.

Two word pools: PLAIN_WORDS for pipeline tests, and an adversarial pool
that adds quote/bracket/tag-shaped punctuation for codec stress. The
adversarial pool deliberately contains tag look-alikes ("<claims>",
"</claimed>") but never anything the codec recognizes as a real tag, so
round-trip identity is a fair expectation.
"""

from __future__ import annotations

import random

from acdkit.corpus.model import (
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
)
from acdkit.corpus.tokenizer import tokenize

PLAIN_WORDS = (
    "the a we they voters policy tax growth deficit school reform "
    "evidence shows support oppose because therefore however people "
    "need better plan cost benefit health jobs energy future strong "
    "wrong right clear state nation debate argued history record "
    "don't it's won't we've couldn't numbers rise fall years decade"
).split()

ADVERSARIAL_WORDS = PLAIN_WORDS + [
    '"quoted"',
    "'single'",
    "(parenthetical)",
    "[bracketed]",
    "<claims>",
    "</claimed>",
    "<premises>",
    "<notatag>",
    "a<b",
    "x>y",
    "<",
    ">",
    "co-op",
    "3.5",
    "$5",
    "50%",
    "wait...",
    "semi;colon",
    "em—dash",
    "“curly”",
    "‘tis",
    "years’",
    "e.g.",
    "&amp",
]

_ENDERS = ".!?"


def make_text(rng: random.Random, n_sentences: int, words: list[str]) -> str:
    sentences = []
    for _ in range(n_sentences):
        n = rng.randint(3, 12)
        picked = [rng.choice(words) for _ in range(n)]
        sentence = " ".join(picked) + rng.choice(_ENDERS)
        sentences.append(sentence)
    return " ".join(sentences)


def random_spans(
    rng: random.Random, n_tokens: int, max_spans: int
) -> list[ComponentSpan]:
    spans: list[ComponentSpan] = []
    cursor = 0
    budget = rng.randint(0, max_spans)
    while len(spans) < budget and cursor < n_tokens:
        start = cursor + rng.randint(0, 4)
        if start >= n_tokens:
            break
        end = min(n_tokens - 1, start + rng.randint(0, 7))
        spans.append(
            ComponentSpan(
                start,
                end,
                rng.choice((ComponentType.CLAIM, ComponentType.PREMISE)),
            )
        )
        cursor = end + 2  # at least one gap token avoids adjacent ambiguity
    return spans


def make_document(
    rng: random.Random,
    doc_id: str,
    *,
    n_sentences: tuple[int, int] = (1, 6),
    max_spans: int = 10,
    adversarial: bool = False,
) -> LabeledDocument:
    words = ADVERSARIAL_WORDS if adversarial else PLAIN_WORDS
    text = make_text(rng, rng.randint(*n_sentences), list(words))
    tokens = tuple(tokenize(text))
    spans = tuple(random_spans(rng, len(tokens), max_spans))
    return LabeledDocument(
        id=doc_id,
        source_corpus=SourceCorpus.SYNTHETIC,
        text=text,
        tokens=tokens,
        spans=spans,
    )


def make_corpus(
    n_docs: int,
    seed: int,
    *,
    adversarial: bool = False,
    max_spans: int = 10,
    n_sentences: tuple[int, int] = (1, 6),
) -> list[LabeledDocument]:
    rng = random.Random(seed)
    return [
        make_document(
            rng,
            f"syn-{seed}-{i:04d}",
            adversarial=adversarial,
            max_spans=max_spans,
            n_sentences=n_sentences,
        )
        for i in range(n_docs)
    ]
