"""Adapter acceptance: the smoke criterion, verbatim.

tune_generative on 50 pairs for 1 epoch with a sub-200M-parameter model
emits a schema-valid transcript that the pipeline evaluator scores
without error; the encoder baseline overfits a 20-document corpus to
training macro F1 > 0.9.
"""

from __future__ import annotations

import json
import random
import subprocess

from finetune_adapter.config import TuneConfig
from finetune_adapter.encoder import tune_encoder_baseline
from finetune_adapter.evalbridge import run_evaluator
from finetune_adapter.generative import tune_generative

from conftest import _make_token_table, run_acdkit


def test_adapter_smoke_generative_50_pairs(tmp_path):
    rng = random.Random(50)
    table = tmp_path / "source.tsv"
    table.write_text(_make_token_table(rng, 50), encoding="utf-8")
    corpus = tmp_path / "corpus.jsonl"
    run_acdkit("convert", table, "--format", "token-table", "--output", corpus)
    pairs = tmp_path / "pairs.jsonl"
    run_acdkit("export-train", corpus, "--output", pairs)
    assert len(pairs.read_text().splitlines()) == 50  # one chunk per doc

    config = TuneConfig(
        base_model_id="tiny-gpt2",
        epochs=1,
        learning_rate=3e-4,
        batch_size=10,
        max_new_tokens=80,
        seed=0,
    )
    run = tune_generative(pairs, pairs, corpus, tmp_path / "run", config)
    assert run.n_parameters < 200_000_000

    records = [json.loads(l) for l in run.transcript_path.read_text().splitlines()]
    assert len(records) == 50
    assert all(r["error"] is None for r in records)

    report = run_evaluator(
        "acdkit", corpus, tmp_path / "eval", transcript=run.transcript_path
    )
    assert 0.0 <= report["macro_f1"] <= 1.0
    assert 0.0 <= report["accuracy"] <= 1.0


def test_adapter_smoke_encoder_overfit(tmp_path):
    rng = random.Random(20)
    table = tmp_path / "source.tsv"
    table.write_text(_make_token_table(rng, 20), encoding="utf-8")
    corpus = tmp_path / "corpus.jsonl"
    run_acdkit("convert", table, "--format", "token-table", "--output", corpus)
    tokens = tmp_path / "tokens.tsv"
    run_acdkit(
        "convert", corpus, "--format", "canonical", "--to", "token-table",
        "--output", tokens,
    )
    config = TuneConfig(
        base_model_id="tiny-encoder",
        epochs=60,
        learning_rate=2e-3,
        eval_every=10,
        seed=1,
    )
    run = tune_encoder_baseline(corpus, tokens, tmp_path / "run", config)
    evaluated = [s for s in run.epoch_scores if s is not None]
    assert max(evaluated) > 0.9


def test_primary_suite_is_independent_of_the_adapter():
    # the pipeline's own CLI works with no adapter artifacts anywhere near
    proc = subprocess.run(["acdkit", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "predict" in proc.stdout and "evaluate" in proc.stdout
