from __future__ import annotations

import logging

import pytest

from acdkit.corpus.model import ComponentType
from acdkit.corpus.standoff import parse_standoff
from acdkit.errors import SpanRangeError, StandoffParseError

TEXT = "We should act. Prices rose."


def test_single_well_formed_span():
    doc = parse_standoff(TEXT, "T1\tClaim 0 13\tWe should act", doc_id="e1")
    assert len(doc.spans) == 1
    span = doc.spans[0]
    assert span.kind is ComponentType.CLAIM
    assert [t.text for t in doc.tokens[span.start_token : span.end_token + 1]] == [
        "We",
        "should",
        "act",
    ]
    assert doc.text == TEXT


def test_major_claim_maps_to_claim():
    doc = parse_standoff(TEXT, "T1\tMajorClaim 0 13\tWe should act")
    assert doc.spans[0].kind is ComponentType.CLAIM


def test_evidence_maps_to_premise():
    doc = parse_standoff(TEXT, "T1\tEvidence 15 26\tPrices rose")
    assert doc.spans[0].kind is ComponentType.PREMISE


def test_unmapped_type_dropped_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        doc = parse_standoff(TEXT, "T1\tStance 0 13\tWe should act")
    assert doc.spans == ()
    assert any("unmapped type" in r.message for r in caplog.records)


def test_mid_token_offsets_snap_outward(caplog):
    # Independent character-scan oracle: widen [19, 24) ("es ro", cutting
    # "Prices" and "rose") to the nearest enclosing non-space boundaries.
    start, end = 19, 24
    lo = start
    while lo > 0 and not TEXT[lo - 1].isspace():
        lo -= 1
    hi = end
    while hi < len(TEXT) and not TEXT[hi].isspace() and TEXT[hi] not in ".,!?":
        hi += 1
    assert (lo, hi) == (15, 26)  # frozen oracle output: "Prices rose"

    with caplog.at_level(logging.WARNING):
        doc = parse_standoff(TEXT, f"T1\tPremise {start} {end}\tes ro")
    span = doc.spans[0]
    covered = TEXT[
        doc.tokens[span.start_token].char_start : doc.tokens[span.end_token].char_end
    ]
    assert covered == TEXT[lo:hi] == "Prices rose"
    assert any("snapped" in r.message for r in caplog.records)


def test_relation_and_attribute_lines_ignored():
    ann = "T1\tClaim 0 13\tWe should act\nR1\tsupports Arg1:T1 Arg2:T2\nA1\tNegated T1\n#1\tAnnotatorNotes T1\tcheck"
    doc = parse_standoff(TEXT, ann)
    assert len(doc.spans) == 1


def test_discontinuous_annotation_bridged(caplog):
    with caplog.at_level(logging.WARNING):
        doc = parse_standoff(TEXT, "T1\tClaim 0 2;10 13\tWe act")
    span = doc.spans[0]
    assert (span.start_token, span.end_token) == (0, 2)
    assert any("discontinuous" in r.message for r in caplog.records)


def test_overlapping_annotations_second_dropped(caplog):
    ann = "T1\tClaim 0 13\tWe should act\nT2\tPremise 3 13\tshould act"
    with caplog.at_level(logging.WARNING):
        doc = parse_standoff(TEXT, ann)
    assert len(doc.spans) == 1
    assert doc.spans[0].kind is ComponentType.CLAIM


def test_malformed_line_reports_line_number():
    with pytest.raises(StandoffParseError) as err:
        parse_standoff(TEXT, "T1\tClaim 0 13\tok\nT2\tClaim zero 13\tbad")
    assert err.value.line_number == 2


def test_offsets_beyond_text_raise_range_error():
    with pytest.raises(SpanRangeError):
        parse_standoff(TEXT, "T1\tClaim 0 999\ttoo far")


def test_surface_mismatch_warns_but_offsets_win(caplog):
    with caplog.at_level(logging.WARNING):
        doc = parse_standoff(TEXT, "T1\tClaim 0 13\tWrong surface")
    assert len(doc.spans) == 1
    assert any("surface" in r.message for r in caplog.records)
