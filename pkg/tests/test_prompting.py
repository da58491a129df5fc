from __future__ import annotations

import random

import pytest

from acdkit.corpus.model import (
    ComponentSpan,
    ComponentType,
    LabeledDocument,
    SourceCorpus,
)
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import ChunkingError, DataError
from acdkit.prompting import (
    DEFAULT_TEMPLATE,
    PromptTemplate,
    chunk_document,
    chunk_spans,
    effective_budget,
    encode_chunk,
    export_training_pairs,
    read_pairs,
    render_prompt,
    sentence_token_ranges,
    write_pairs,
)
from acdkit.tagcodec import strip_tags

from synthgen import make_corpus, make_document


def doc_of(text, spans=()):
    return LabeledDocument(
        id="d",
        source_corpus=SourceCorpus.SYNTHETIC,
        text=text,
        tokens=tuple(tokenize(text)),
        spans=tuple(ComponentSpan(s, e, k) for s, e, k in spans),
    )


def sentence_doc(n_sentences, words_per_sentence, spans=()):
    sentences = [
        " ".join(f"w{s}x{w}" for w in range(words_per_sentence - 1)) + " end."
        for s in range(n_sentences)
    ]
    return doc_of(" ".join(sentences), spans)


def test_template_requires_exactly_one_placeholder():
    with pytest.raises(DataError):
        PromptTemplate("no placeholder", "f", "bad")
    with pytest.raises(DataError):
        PromptTemplate("{input_text} {input_text}", "f", "bad")


def test_render_simple_template():
    template = PromptTemplate("T: {input_text}", "", "t")
    chunk = chunk_document(doc_of("abc"), 10)[0]
    assert render_prompt(template, chunk) == "T: abc"


def test_default_template_embeds_chunk_verbatim():
    doc = make_document(random.Random(1), "d")
    chunk = chunk_document(doc, 2048)[0]
    prompt = render_prompt(DEFAULT_TEMPLATE, chunk)
    assert chunk.text in prompt
    assert "<claim>" in prompt and "<premise>" in prompt  # format clause


def test_render_is_injective_over_chunks():
    rng = random.Random(3)
    corpus = make_corpus(30, seed=3)
    prompts = {}
    for doc in corpus:
        for chunk in chunk_document(doc, 2048):
            rendered = render_prompt(DEFAULT_TEMPLATE, chunk)
            assert prompts.get(rendered, chunk.text) == chunk.text
            prompts[rendered] = chunk.text


def test_sentence_ranges_simple_rule():
    doc = doc_of("One two. Three! Four? No terminal")
    ranges = sentence_token_ranges(doc)
    texts = [
        " ".join(t.text for t in doc.tokens[s : e + 1]) for s, e in ranges
    ]
    assert texts == ["One two .", "Three !", "Four ?", "No terminal"]


def test_abbreviation_period_still_splits():
    # The rule is deliberately dumb: '.' + space always ends a sentence.
    doc = doc_of("Mr. Smith won. Yes.")
    assert len(sentence_token_ranges(doc)) == 3


def test_decimal_point_does_not_split():
    doc = doc_of("Rate is 3.5 now.")
    assert len(sentence_token_ranges(doc)) == 1


def test_small_document_is_one_chunk():
    doc = doc_of("just ten tokens in a single tiny sentence here now.")
    chunks = chunk_document(doc, 1024)
    assert len(chunks) == 1
    assert chunks[0].text == doc.text
    assert chunks[0].token_count == len(doc.tokens)


def test_two_big_sentences_two_chunks():
    doc = sentence_doc(2, 599)  # 600 tokens per sentence
    chunks = chunk_document(doc, 1024)
    assert len(chunks) == 2
    assert [c.token_count for c in chunks] == [600, 600]


def test_span_crossing_boundary_moves_before_span():
    # 4 sentences x 10 tokens, budget 25. Without the span the cut lands
    # after sentence 1; a span straddling sentences 1-2 moves it after
    # sentence 0 so the span stays whole.
    doc_plain = sentence_doc(4, 9)
    assert len(doc_plain.tokens) == 40
    assert [(c.token_start, c.token_end) for c in chunk_document(doc_plain, 25)] == [
        (0, 19),
        (20, 39),
    ]

    doc = sentence_doc(4, 9, [(15, 25, ComponentType.CLAIM)])
    chunks = chunk_document(doc, 25)
    assert [(c.token_start, c.token_end) for c in chunks] == [
        (0, 9),
        (10, 29),
        (30, 39),
    ]
    for chunk in chunks:
        assert chunk.token_count <= 25


def test_no_span_crosses_chunk_boundary_randomized():
    rng = random.Random(99)
    for i in range(60):
        doc = make_document(rng, f"d{i}", n_sentences=(3, 10), max_spans=8)
        budget = rng.choice([12, 20, 40, 80])
        if any(s.token_count > budget for s in doc.spans):
            continue
        try:
            chunks = chunk_document(doc, budget)
        except ChunkingError:
            continue  # a fused sentence group can exceed small budgets
        # oracle: every span fits inside exactly one chunk
        for span in doc.spans:
            containing = [
                c
                for c in chunks
                if c.token_start <= span.start_token and span.end_token <= c.token_end
            ]
            assert len(containing) == 1
        # chunks partition the token index set in order
        covered = []
        for chunk in chunks:
            covered.extend(range(chunk.token_start, chunk.token_end + 1))
        assert covered == list(range(len(doc.tokens)))
        assert all(c.token_count <= budget for c in chunks)


def test_oversized_sentence_raises_with_doc_name():
    doc = sentence_doc(1, 50)
    with pytest.raises(ChunkingError) as err:
        chunk_document(doc, 10)
    assert "d" in str(err.value)


def test_oversized_span_raises():
    doc = sentence_doc(3, 10, [(0, 25, ComponentType.PREMISE)])
    with pytest.raises(ChunkingError):
        chunk_document(doc, 12)


def test_effective_budget():
    assert effective_budget(1024, 0.6) == 614
    assert effective_budget(10, 0.05) == 1
    with pytest.raises(DataError):
        effective_budget(1024, 0.0)


def test_pair_fidelity_and_span_preservation():
    corpus = make_corpus(40, seed=13)
    pairs = export_training_pairs(corpus, DEFAULT_TEMPLATE, budget=64, safety_factor=1.0)
    by_doc: dict[str, int] = {}
    for pair in pairs:
        assert strip_tags(pair.target) == pair.input
        assert pair.input in pair.instruction
        n_spans = pair.target.count("<claim>") + pair.target.count("<premise>")
        by_doc[pair.doc_id] = by_doc.get(pair.doc_id, 0) + n_spans
    for doc in corpus:
        assert by_doc.get(doc.id, 0) == len(doc.spans)


def test_zero_span_document_target_equals_input():
    doc = doc_of("nothing argumentative here.")
    pairs = export_training_pairs([doc])
    assert len(pairs) == 1
    assert pairs[0].target == pairs[0].input == doc.text


def test_one_pair_per_single_chunk_document():
    corpus = make_corpus(12, seed=5, n_sentences=(1, 2))
    pairs = export_training_pairs(corpus, budget=4096, safety_factor=1.0)
    assert len(pairs) == len(corpus)


def test_encode_chunk_matches_full_encode_for_single_chunk():
    from acdkit.tagcodec import encode_xml

    doc = make_document(random.Random(8), "d")
    chunk = chunk_document(doc, 4096)[0]
    assert encode_chunk(doc, chunk) == encode_xml(doc)


def test_pairs_file_round_trip(tmp_path):
    corpus = make_corpus(6, seed=20)
    pairs = export_training_pairs(corpus)
    path = tmp_path / "pairs.jsonl"
    assert write_pairs(pairs, path) == len(pairs)
    loaded = read_pairs(path)
    assert loaded == pairs
