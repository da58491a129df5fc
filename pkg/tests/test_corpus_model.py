from __future__ import annotations

import random

import pytest

from acdkit.corpus.bio import BIO_TAGS, bio_to_spans, is_valid_bio, spans_to_bio
from acdkit.corpus.model import (
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
    Token,
    snap_char_range_to_tokens,
)
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import BioSchemeError, DataError

from synthgen import make_corpus


def build_doc(text, spans=()):
    return LabeledDocument(
        id="d",
        source_corpus=SourceCorpus.SYNTHETIC,
        text=text,
        tokens=tuple(tokenize(text)),
        spans=tuple(ComponentSpan(s, e, k) for s, e, k in spans),
    )


def test_token_validation():
    with pytest.raises(DataError):
        Token("", 0, 1)
    with pytest.raises(DataError):
        Token("ab", 3, 3)
    with pytest.raises(DataError):
        Token("ab", 0, 1)  # extent shorter than text


def test_document_rejects_mismatched_token_slice():
    with pytest.raises(DataError):
        LabeledDocument(
            id="d",
            source_corpus=SourceCorpus.SYNTHETIC,
            text="ab cd",
            tokens=(Token("ab", 0, 2), Token("xd", 3, 5)),
            spans=(),
        )


def test_document_rejects_overlapping_tokens():
    with pytest.raises(DataError):
        LabeledDocument(
            id="d",
            source_corpus=SourceCorpus.SYNTHETIC,
            text="abc",
            tokens=(Token("ab", 0, 2), Token("bc", 1, 3)),
            spans=(),
        )


def test_document_rejects_overlapping_spans():
    with pytest.raises(DataError):
        build_doc(
            "one two three four",
            [(0, 2, ComponentType.CLAIM), (2, 3, ComponentType.PREMISE)],
        )


def test_document_rejects_span_out_of_range():
    with pytest.raises(DataError):
        build_doc("one two", [(0, 5, ComponentType.CLAIM)])


def test_spans_to_bio_expansion():
    doc = build_doc("a b c d e", [(1, 3, ComponentType.PREMISE)])
    assert spans_to_bio(5, doc.spans) == ["O", "B-Premise", "I-Premise", "I-Premise", "O"]


def test_bio_to_spans_all_o():
    spans, repairs = bio_to_spans(["O"])
    assert spans == [] and repairs == []


def test_bio_to_spans_minimal_run():
    spans, repairs = bio_to_spans(["B-Claim", "I-Claim", "O"])
    assert spans == [ComponentSpan(0, 1, ComponentType.CLAIM)]
    assert repairs == []


def _brute_force_runs(tags):
    """Independent oracle: contiguous same-kind non-O runs, where a B tag
    always breaks a run."""
    runs = []
    i = 0
    while i < len(tags):
        if tags[i] == "O":
            i += 1
            continue
        kind = tags[i][2:]
        j = i
        while j + 1 < len(tags) and tags[j + 1] == f"I-{kind}":
            j += 1
        runs.append((i, j, kind))
        i = j + 1
    return runs


def test_bio_repair_matches_brute_force_scanner():
    tags = ["O", "I-Premise"]
    spans, repairs = bio_to_spans(tags)
    assert [(s.start_token, s.end_token, s.kind.value) for s in spans] == _brute_force_runs(tags)
    assert len(repairs) == 1 and repairs[0].token_index == 1

    rng = random.Random(21)
    for _ in range(300):
        tags = [rng.choice(BIO_TAGS) for _ in range(rng.randint(0, 12))]
        spans, _ = bio_to_spans(tags)
        assert [
            (s.start_token, s.end_token, s.kind.value) for s in spans
        ] == _brute_force_runs(tags)


def test_bio_strict_rejects_orphan_inside():
    with pytest.raises(BioSchemeError):
        bio_to_spans(["O", "I-Claim"], strict=True)
    with pytest.raises(BioSchemeError):
        bio_to_spans(["B-Premise", "I-Claim"], strict=True)


def test_bio_round_trip_is_identity():
    for doc in make_corpus(60, seed=3):
        tags = spans_to_bio(len(doc.tokens), doc.spans)
        assert is_valid_bio(tags)
        spans, repairs = bio_to_spans(tags)
        assert repairs == []
        assert tuple(spans) == doc.spans


def test_snap_char_range():
    tokens = tokenize("Prices rose fast.")
    # Cutting "Prices" mid-token widens to the whole token.
    assert snap_char_range_to_tokens(tokens, 4, 11) == (0, 1, True)
    assert snap_char_range_to_tokens(tokens, 0, 6) == (0, 0, False)
    assert snap_char_range_to_tokens(tokens, 6, 7) is None  # whitespace only
