from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from acdkit.corpus.tokenizer import NO_SPACE_BEFORE, detokenize, tokenize

from synthgen import make_text, ADVERSARIAL_WORDS


def token_tuples(text):
    return [(t.text, t.char_start, t.char_end) for t in tokenize(text)]


def test_empty_text_yields_no_tokens():
    assert tokenize("") == []
    assert tokenize("   \t\n ") == []


def test_internal_apostrophe_kept_trailing_period_split():
    # Oracle: re-slice the string from the recorded offsets.
    text = "don't stop."
    tokens = tokenize(text)
    assert [t.text for t in tokens] == ["don't", "stop", "."]
    for tok in tokens:
        assert text[tok.char_start : tok.char_end] == tok.text


def test_double_space_is_gap_not_token():
    assert token_tuples("a  b") == [("a", 0, 1), ("b", 3, 4)]


def test_edge_punctuation_peeled_one_char_at_a_time():
    assert [t.text for t in tokenize('"Hello,"')] == ['"', "Hello", ",", '"']
    assert [t.text for t in tokenize("$5")] == ["$", "5"]
    assert [t.text for t in tokenize("--")] == ["-", "-"]
    assert [t.text for t in tokenize("co-op e.g. 3.5")] == ["co-op", "e.g", ".", "3.5"]
    assert [t.text for t in tokenize("wait...")] == ["wait", ".", ".", "."]


def test_unicode_punctuation_is_edge_punct():
    assert [t.text for t in tokenize("“quoted”")] == ["“", "quoted", "”"]
    assert [t.text for t in tokenize("years’")] == ["years", "’"]


def test_every_nonspace_char_is_covered():
    text = make_text(random.Random(5), 4, list(ADVERSARIAL_WORDS))
    covered = set()
    for tok in tokenize(text):
        covered.update(range(tok.char_start, tok.char_end))
    expected = {i for i, ch in enumerate(text) if not ch.isspace()}
    assert covered == expected


@given(st.text(max_size=200))
@settings(max_examples=300, deadline=None)
def test_lossless_reconstruction(text):
    tokens = tokenize(text)
    rebuilt = []
    pos = 0
    for tok in tokens:
        gap = text[pos : tok.char_start]
        assert gap.strip() == ""  # gaps are whitespace only
        rebuilt.append(gap)
        rebuilt.append(tok.text)
        assert text[tok.char_start : tok.char_end] == tok.text
        pos = tok.char_end
    rebuilt.append(text[pos:])
    assert "".join(rebuilt) == text


def test_detokenize_spacing_policy():
    text, tokens = detokenize(["I", "agree", ",", "mostly", "(", "not", ")", "."])
    assert text == "I agree, mostly ( not)."
    for tok in tokens:
        assert text[tok.char_start : tok.char_end] == tok.text


def test_detokenize_no_space_before_closers():
    for closer in sorted(NO_SPACE_BEFORE):
        text, _ = detokenize(["x", closer])
        assert text == f"x{closer}"
