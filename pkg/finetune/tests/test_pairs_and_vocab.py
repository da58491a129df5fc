from __future__ import annotations

import json

import pytest

from finetune_adapter.config import AdapterConfigError, TuneConfig
from finetune_adapter.corpusio import read_tokenized_corpus
from finetune_adapter.pairsio import PairsSchemaError, read_pairs
from finetune_adapter.vocab import PieceVocab, Vocab, join_generative, split_generative


def test_read_pairs_validates_schema(tmp_path):
    good = {
        "doc_id": "d",
        "chunk_index": 0,
        "instruction": "do it: xyz",
        "input": "xyz",
        "target": "<claim>xyz</claim>",
        "template_version": "v1",
    }
    path = tmp_path / "pairs.jsonl"
    path.write_text(json.dumps(good) + "\n", encoding="utf-8")
    assert len(read_pairs(path)) == 1

    for broken in (
        {k: v for k, v in good.items() if k != "target"},
        {**good, "chunk_index": "zero"},
        {**good, "instruction": "does not embed the chunk"},
    ):
        path.write_text(json.dumps(broken) + "\n", encoding="utf-8")
        with pytest.raises(PairsSchemaError):
            read_pairs(path)


def test_read_pairs_rejects_empty_file(tmp_path):
    path = tmp_path / "pairs.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(PairsSchemaError):
        read_pairs(path)


def test_generative_split_keeps_tags_atomic():
    symbols = split_generative("so <claim>we act</claim> now")
    assert symbols == ["so", "<claim>", "we", "act", "</claim>", "now"]
    assert join_generative(symbols) == "so <claim> we act </claim> now"


def test_vocab_round_trip():
    vocab = Vocab.build([["a", "b"], ["b", "c"]])
    ids = vocab.encode(["a", "c", "zzz"])
    assert vocab.decode(ids) == ["a", "c", "<unk>"]


def test_piece_vocab_first_subword_mapping():
    vocab = PieceVocab.build([("known", "words")])
    ids, firsts = vocab.encode_tokens(["known", "novel"])
    assert firsts[0] == 0
    # "novel" is unseen: split into character pieces, first piece carries it
    assert vocab.split_word("novel") == ["n", "##o", "##v", "##e", "##l"]
    assert firsts[1] == 1
    assert len(ids) == 1 + 5


def test_tune_config_generative_requirements():
    config = TuneConfig()
    with pytest.raises(AdapterConfigError):
        config.require_generative_hyperparams()
    assert TuneConfig(learning_rate=None).encoder_learning_rate() == 1e-4
    with pytest.raises(AdapterConfigError):
        TuneConfig(base_model_id="llama-huge")


def test_read_tokenized_corpus_zips_views(workspace):
    docs = read_tokenized_corpus(workspace["train_corpus"], workspace["train_tokens"])
    assert len(docs) == 20
    assert all(len(d.tokens) == len(d.tags) for d in docs)
    assert all(d.doc_id for d in docs)
