"""Smoke-scale generative instruction tuning.

Trains a from-scratch small causal LM (GPT-2 architecture, word-level
local vocabulary) on (instruction -> tagged text) pairs, generates
greedily for the dev pairs after each epoch, and keeps the checkpoint
whose dev transcript scores the highest macro F1 under the pipeline
evaluator. Well under the 200M-parameter ceiling by construction.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import GPT2Config, GPT2LMHeadModel

from finetune_adapter.config import TuneConfig
from finetune_adapter.evalbridge import (
    DecodingContract,
    macro_f1,
    run_evaluator,
    write_transcript,
)
from finetune_adapter.pairsio import Pair, read_pairs
from finetune_adapter.vocab import Vocab, join_generative, split_generative

logger = logging.getLogger(__name__)

MAX_POSITIONS = 512


@dataclass
class GenerativeRun:
    model_dir: Path
    transcript_path: Path
    selected_epoch: int
    epoch_scores: list[float | None]
    n_parameters: int


def build_model(vocab_size: int, seed: int) -> GPT2LMHeadModel:
    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=vocab_size,
        n_positions=MAX_POSITIONS,
        n_embd=128,
        n_layer=2,
        n_head=4,
        bos_token_id=0,
        eos_token_id=0,
    )
    return GPT2LMHeadModel(config)


def _encode_pair(vocab: Vocab, pair: Pair) -> list[int]:
    prompt_ids = vocab.encode(split_generative(pair.instruction))
    target_ids = vocab.encode(split_generative(pair.target))
    ids = prompt_ids + target_ids + [vocab.eos_id]
    if len(ids) > MAX_POSITIONS:
        # keep the tail: the input chunk and target matter most
        ids = ids[-MAX_POSITIONS:]
    return ids


def _batches(sequences: list[list[int]], batch_size: int, pad_id: int):
    for start in range(0, len(sequences), batch_size):
        chunk = sequences[start : start + batch_size]
        width = max(len(s) for s in chunk)
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        labels = torch.full((len(chunk), width), -100, dtype=torch.long)
        for i, seq in enumerate(chunk):
            input_ids[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
            labels[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        yield input_ids, labels


@torch.no_grad()
def greedy_generate(
    model: GPT2LMHeadModel, vocab: Vocab, prompt: str, max_new_tokens: int
) -> str:
    model.eval()
    ids = vocab.encode(split_generative(prompt))
    if len(ids) >= MAX_POSITIONS:
        ids = ids[-(MAX_POSITIONS - max_new_tokens - 1) :]
    generated: list[int] = []
    current = torch.tensor([ids], dtype=torch.long)
    for _ in range(max_new_tokens):
        if current.shape[1] >= MAX_POSITIONS:
            break
        logits = model(input_ids=current).logits[0, -1]
        next_id = int(torch.argmax(logits))
        if next_id == vocab.eos_id:
            break
        generated.append(next_id)
        current = torch.cat(
            [current, torch.tensor([[next_id]], dtype=torch.long)], dim=1
        )
    return join_generative(vocab.decode(generated))


def generate_transcript_rows(
    model: GPT2LMHeadModel,
    vocab: Vocab,
    pairs: list[Pair],
    max_new_tokens: int,
) -> list[dict]:
    rows = []
    for pair in pairs:
        output = greedy_generate(model, vocab, pair.instruction, max_new_tokens)
        rows.append(
            {
                "prompt": pair.instruction,
                "output": output,
                "doc_id": pair.doc_id,
                "chunk_index": pair.chunk_index,
                "template_version": pair.template_version,
            }
        )
    return rows


def tune_generative(
    train_pairs_path: str | Path,
    dev_pairs_path: str | Path,
    dev_corpus_path: str | Path,
    output_dir: str | Path,
    config: TuneConfig,
    eval_config_path: str | Path | None = None,
) -> GenerativeRun:
    """Train, select the best checkpoint by dev macro F1, and leave the
    selected checkpoint's transcript at <output_dir>/transcript.jsonl."""
    config.require_generative_hyperparams()
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    train_pairs = read_pairs(train_pairs_path)
    dev_pairs = read_pairs(dev_pairs_path)
    vocab = Vocab.build(
        [split_generative(p.instruction) + split_generative(p.target) for p in train_pairs]
        + [split_generative(p.instruction) for p in dev_pairs]
    )
    model = build_model(len(vocab), config.seed)
    n_parameters = sum(p.numel() for p in model.parameters())
    assert n_parameters < 200_000_000, "generative preset must stay small"

    sequences = [_encode_pair(vocab, p) for p in train_pairs]
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    backend_id = f"{config.base_model_id}-ft"
    decoding = DecodingContract(max_output_tokens=2048)

    best_score = float("-inf")
    best_epoch = -1
    epoch_scores: list[float | None] = []
    transcript_path = out / "transcript.jsonl"
    best_state = None

    for epoch in range(1, config.epochs + 1):
        model.train()
        total_loss = 0.0
        for input_ids, labels in _batches(sequences, config.batch_size, vocab.pad_id):
            optimizer.zero_grad()
            loss = model(input_ids=input_ids, labels=labels).loss
            loss.backward()
            optimizer.step()
            total_loss += loss.item()
        logger.info("epoch %d: train loss %.4f", epoch, total_loss)

        if epoch % config.eval_every and epoch != config.epochs:
            epoch_scores.append(None)  # not evaluated this epoch
            continue
        rows = generate_transcript_rows(model, vocab, dev_pairs, config.max_new_tokens)
        epoch_transcript = out / f"transcript-epoch{epoch}.jsonl"
        write_transcript(epoch_transcript, rows, backend_id, decoding)
        report = run_evaluator(
            config.acdkit_bin,
            dev_corpus_path,
            out / f"eval-epoch{epoch}",
            transcript=epoch_transcript,
            config=eval_config_path,
        )
        score = macro_f1(report)
        epoch_scores.append(score)
        logger.info("epoch %d: dev macro F1 %.4f", epoch, score)
        if score > best_score:
            best_score = score
            best_epoch = epoch
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
            transcript_path.write_text(
                epoch_transcript.read_text(encoding="utf-8"), encoding="utf-8"
            )

    model_dir = out / "model"
    model_dir.mkdir(exist_ok=True)
    if best_state is not None:
        model.load_state_dict(best_state)
    torch.save(model.state_dict(), model_dir / "weights.pt")
    (model_dir / "vocab.json").write_text(
        json.dumps(vocab.symbol_to_id, ensure_ascii=False), encoding="utf-8"
    )
    summary = {
        "base_model_id": config.base_model_id,
        "n_parameters": n_parameters,
        "epochs": config.epochs,
        "epoch_dev_macro_f1": epoch_scores,
        "selected_epoch": best_epoch,
        "selected_dev_macro_f1": best_score,
        "checkpoint_metric": "validation macro F1 (pipeline evaluator)",
    }
    (out / "run.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    return GenerativeRun(
        model_dir=model_dir,
        transcript_path=transcript_path,
        selected_epoch=best_epoch,
        epoch_scores=epoch_scores,
        n_parameters=n_parameters,
    )
