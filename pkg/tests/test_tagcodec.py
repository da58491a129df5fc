from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acdkit.corpus.model import CharSpan, ComponentType
from acdkit.errors import TagStructureError
from acdkit.tagcodec import (
    RepairKind,
    decode_xml,
    encode_char_spans,
    encode_xml,
    strip_tags,
    tag_skeleton,
)

from synthgen import make_corpus, make_document


def kinds(outcome):
    return [s.kind.value for s in outcome.char_spans]


def test_no_tags_passes_through():
    outcome = decode_xml("no tags here")
    assert outcome.plain_text == "no tags here"
    assert outcome.char_spans == ()
    assert outcome.repairs == ()


def test_minimal_well_formed_pair():
    outcome = decode_xml("<claim>A</claim> b <premise>c</premise>")
    assert outcome.plain_text == "A b c"
    assert kinds(outcome) == ["Claim", "Premise"]
    assert [(s.start_char, s.end_char) for s in outcome.char_spans] == [(0, 1), (4, 5)]
    assert outcome.repairs == ()


def test_zero_span_document_encodes_to_its_text():
    doc = make_document(random.Random(0), "d", max_spans=0)
    assert encode_xml(doc) == doc.text


def test_tag_skeleton_examples():
    assert tag_skeleton("") == []
    events = tag_skeleton("<premise></premise>")
    assert [(e.kind.value, e.closing, e.char_pos) for e in events] == [
        ("Premise", False, 0),
        ("Premise", True, 9),
    ]
    events = tag_skeleton("a <claim> b")
    assert [(e.kind.value, e.closing, e.char_pos) for e in events] == [
        ("Claim", False, 2)
    ]


def test_case_insensitive_and_internal_whitespace_accepted():
    outcome = decode_xml("<CLAIM>A</Claim> <premise >b</ premise>")
    assert outcome.plain_text == "A b"
    assert kinds(outcome) == ["Claim", "Premise"]
    assert outcome.repairs == ()


def test_unknown_taglike_substrings_stay_literal():
    for text in ("<claims>x</claims>", "a <notatag> b", "a < b > c", "<claimant>"):
        outcome = decode_xml(text)
        assert outcome.plain_text == text
        assert outcome.char_spans == ()
        assert outcome.repairs == ()


# Hand-written recovery table covering every single-fault case.
SINGLE_FAULT_TABLE = [
    # (input, plain, [(start, end, kind)], [repair kinds])
    (
        "<claim>A b",
        "A b",
        [(0, 3, "Claim")],
        [RepairKind.UNCLOSED_OPEN],
    ),
    (
        "A</claim> b",
        "A b",
        [],
        [RepairKind.UNOPENED_CLOSE],
    ),
    (
        "<claim>A<premise>b</premise>",
        "Ab",
        [(0, 1, "Claim"), (1, 2, "Premise")],
        [RepairKind.NESTED_OPEN],
    ),
    (
        "<claim>A</premise> b",
        "A b",
        [(0, 1, "Claim")],
        [RepairKind.MISMATCHED_CLOSE],
    ),
    (
        "<claim>A<claim>b</claim>",
        "Ab",
        [(0, 1, "Claim"), (1, 2, "Claim")],
        [RepairKind.NESTED_OPEN],
    ),
    (
        # the space after the open tag belongs to the span
        "x </premise>y<premise> z",
        "x y z",
        [(3, 5, "Premise")],
        [RepairKind.UNOPENED_CLOSE, RepairKind.UNCLOSED_OPEN],
    ),
]


@pytest.mark.parametrize("tagged,plain,spans,repair_kinds", SINGLE_FAULT_TABLE)
def test_lenient_recovery_table(tagged, plain, spans, repair_kinds):
    outcome = decode_xml(tagged, "lenient")
    assert outcome.plain_text == plain
    assert [(s.start_char, s.end_char, s.kind.value) for s in outcome.char_spans] == spans
    assert [r.kind for r in outcome.repairs] == repair_kinds


@pytest.mark.parametrize("tagged", [row[0] for row in SINGLE_FAULT_TABLE])
def test_strict_mode_raises_on_each_fault(tagged):
    with pytest.raises(TagStructureError) as err:
        decode_xml(tagged, "strict")
    assert err.value.char_pos >= 0


def test_strict_error_reports_char_position():
    with pytest.raises(TagStructureError) as err:
        decode_xml("ab </claim>", "strict")
    assert err.value.char_pos == 3


def test_round_trip_random_documents():
    corpus = make_corpus(150, seed=42, adversarial=True)
    for doc in corpus:
        tagged = encode_xml(doc)
        outcome = decode_xml(tagged, "strict")
        assert outcome.plain_text == doc.text
        assert outcome.repairs == ()
        assert outcome.char_spans == doc.char_spans()
        assert outcome.spans == doc.spans


def test_strip_property():
    for doc in make_corpus(60, seed=7, adversarial=True):
        assert strip_tags(encode_xml(doc)) == doc.text


@given(st.text(alphabet="<>/clampremis aeiou.!?\"'", max_size=120))
@settings(max_examples=400, deadline=None)
def test_lenient_parse_is_total(text):
    outcome = decode_xml(text, "lenient")
    # repairs empty iff well-formed: reparse of a clean parse stays clean
    assert strip_tags(text) == outcome.plain_text


@given(st.text(alphabet="<>/clampremis aeiou.!?\"'", max_size=120))
@settings(max_examples=400, deadline=None)
def test_repair_idempotence(text):
    from hypothesis import assume

    from acdkit.tagcodec import TAG_RE

    outcome = decode_xml(text, "lenient")
    # Stripping can manufacture a brand-new tag out of fragments
    # ("<cl</premise>aim>"); idempotence is only claimed when the plain
    # text itself is tag-free, which holds for all realistic generations.
    assume(TAG_RE.search(outcome.plain_text) is None)
    reencoded = encode_char_spans(outcome.plain_text, outcome.char_spans)
    second = decode_xml(reencoded, "lenient")
    assert second.repairs == ()
    assert second.plain_text == outcome.plain_text
    assert second.char_spans == outcome.char_spans


def test_adjacent_spans_round_trip():
    text = "alpha beta gamma"
    spans = (
        CharSpan(0, 5, ComponentType.CLAIM),
        CharSpan(5, 10, ComponentType.PREMISE),
    )
    tagged = encode_char_spans(text, spans)
    assert tagged == "<claim>alpha</claim><premise> beta</premise> gamma"
    outcome = decode_xml(tagged, "strict")
    assert outcome.char_spans == spans
    assert outcome.plain_text == text


def test_whitespace_inside_tags_belongs_to_span():
    outcome = decode_xml("<claim> padded </claim>!")
    assert outcome.plain_text == " padded !"
    span = outcome.char_spans[0]
    assert outcome.plain_text[span.start_char : span.end_char] == " padded "


def test_empty_span_survives_char_level_round_trip():
    outcome = decode_xml("<claim></claim>x")
    assert outcome.plain_text == "x"
    assert outcome.char_spans == (CharSpan(0, 0, ComponentType.CLAIM),)
    assert outcome.spans == ()  # no token view for an empty span
    again = decode_xml(encode_char_spans("x", outcome.char_spans), "strict")
    assert again.char_spans == outcome.char_spans
