from __future__ import annotations

import json

import pytest

from acdkit.corpus.interchange import (
    document_to_record,
    read_corpus,
    record_to_document,
    write_corpus,
)
from acdkit.errors import DataError

from synthgen import make_corpus


def test_file_round_trip(tmp_path):
    corpus = make_corpus(25, seed=17, adversarial=True)
    path = tmp_path / "corpus.jsonl"
    assert write_corpus(corpus, path) == 25
    loaded = read_corpus(path)
    assert len(loaded) == 25
    for original, reloaded in zip(corpus, loaded):
        assert reloaded.id == original.id
        assert reloaded.text == original.text
        assert reloaded.source_corpus == original.source_corpus
        assert reloaded.spans == original.spans


def test_record_offsets_are_characters():
    doc = make_corpus(1, seed=2)[0]
    record = document_to_record(doc)
    for raw, span in zip(record["spans"], doc.spans):
        assert doc.text[raw["start_char"] : raw["end_char"]].strip() != ""
        assert raw["kind"] == span.kind.value


def test_foreign_record_snaps_to_token_boundaries(caplog):
    record = {
        "id": "x",
        "source_corpus": "Synthetic",
        "text": "Prices rose fast.",
        "spans": [{"start_char": 2, "end_char": 9, "kind": "Claim"}],
    }
    doc = record_to_document(record)
    span = doc.spans[0]
    assert (span.start_token, span.end_token) == (0, 1)  # widened to "Prices rose"


def test_bad_json_line_reports_position(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"id": "a"}\nnot json\n', encoding="utf-8")
    with pytest.raises(DataError) as err:
        read_corpus(path)
    assert "1" in str(err.value)  # first record is incomplete -> data error


def test_missing_field_rejected():
    with pytest.raises(DataError):
        record_to_document({"id": "a", "text": "x", "spans": []})


def test_unknown_source_corpus_rejected():
    with pytest.raises(DataError):
        record_to_document(
            {"id": "a", "source_corpus": "Elsewhere", "text": "x", "spans": []}
        )


def test_records_are_stable_json(tmp_path):
    corpus = make_corpus(3, seed=23)
    path_a = tmp_path / "a.jsonl"
    path_b = tmp_path / "b.jsonl"
    write_corpus(corpus, path_a)
    write_corpus(corpus, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()
    first = json.loads(path_a.read_text(encoding="utf-8").splitlines()[0])
    assert set(first) == {"id", "source_corpus", "text", "spans"}
