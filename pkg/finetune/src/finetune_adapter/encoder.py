"""Encoder BIO baseline: token classification over corpus tokens.

A from-scratch small bidirectional encoder is trained on windows of up to
max_input_length corpus tokens (default 64). Corpus tokens map to one or
more vocabulary pieces; the label rides on the first piece and the other
pieces are ignored in the loss, so predictions read back one tag per
corpus token regardless of piece splits. Checkpoints are selected by
validation macro F1 from the pipeline evaluator.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import BertConfig, BertForTokenClassification

from finetune_adapter.config import TuneConfig
from finetune_adapter.corpusio import (
    BIO_TAGS,
    CorpusFormatError,
    TokenizedDocument,
    read_tokenized_corpus,
)
from finetune_adapter.evalbridge import macro_f1, run_evaluator, write_predictions
from finetune_adapter.vocab import PieceVocab

logger = logging.getLogger(__name__)

LABEL_TO_ID = {tag: i for i, tag in enumerate(BIO_TAGS)}
ID_TO_LABEL = {i: tag for tag, i in LABEL_TO_ID.items()}


class EmptyCorpusError(ValueError):
    pass


@dataclass
class EncoderRun:
    model_dir: Path
    predictions_path: Path
    selected_epoch: int
    epoch_scores: list[float | None]
    n_parameters: int


@dataclass
class Window:
    doc_id: str
    token_offset: int
    piece_ids: list[int]
    first_piece: list[int]  # index into piece_ids per corpus token
    labels: list[int]  # one per corpus token


def build_model(vocab_size: int, max_pieces: int, seed: int) -> BertForTokenClassification:
    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=128,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=256,
        max_position_embeddings=max_pieces,
        num_labels=len(BIO_TAGS),
    )
    return BertForTokenClassification(config)


def make_windows(
    docs: list[TokenizedDocument], vocab: PieceVocab, max_input_length: int
) -> list[Window]:
    windows: list[Window] = []
    for doc in docs:
        for start in range(0, len(doc.tokens), max_input_length):
            tokens = doc.tokens[start : start + max_input_length]
            tags = doc.tags[start : start + max_input_length]
            piece_ids, firsts = vocab.encode_tokens(tokens)
            windows.append(
                Window(
                    doc_id=doc.doc_id,
                    token_offset=start,
                    piece_ids=piece_ids,
                    first_piece=firsts,
                    labels=[LABEL_TO_ID[tag] for tag in tags],
                )
            )
    return windows


def _window_batches(windows: list[Window], batch_size: int, pad_id: int):
    for start in range(0, len(windows), batch_size):
        chunk = windows[start : start + batch_size]
        width = max(len(w.piece_ids) for w in chunk)
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(chunk), width), dtype=torch.long)
        labels = torch.full((len(chunk), width), -100, dtype=torch.long)
        for i, window in enumerate(chunk):
            n = len(window.piece_ids)
            input_ids[i, :n] = torch.tensor(window.piece_ids, dtype=torch.long)
            attention[i, :n] = 1
            for token_index, piece_index in enumerate(window.first_piece):
                labels[i, piece_index] = window.labels[token_index]
        yield chunk, input_ids, attention, labels


@torch.no_grad()
def predict_corpus_tags(
    model: BertForTokenClassification,
    docs: list[TokenizedDocument],
    vocab: PieceVocab,
    max_input_length: int,
    batch_size: int,
) -> dict[str, list[str]]:
    model.eval()
    predictions: dict[str, list[str]] = {doc.doc_id: [""] * len(doc.tokens) for doc in docs}
    windows = make_windows(docs, vocab, max_input_length)
    for chunk, input_ids, attention, _ in _window_batches(
        windows, batch_size, vocab.vocab.pad_id
    ):
        logits = model(input_ids=input_ids, attention_mask=attention).logits
        picked = torch.argmax(logits, dim=-1)
        for i, window in enumerate(chunk):
            for token_index, piece_index in enumerate(window.first_piece):
                tag = ID_TO_LABEL[int(picked[i, piece_index])]
                predictions[window.doc_id][window.token_offset + token_index] = tag
    return predictions


def tune_encoder_baseline(
    train_corpus_path: str | Path,
    train_token_table_path: str | Path,
    output_dir: str | Path,
    config: TuneConfig,
    val_corpus_path: str | Path | None = None,
    val_token_table_path: str | Path | None = None,
    batch_size: int = 16,
) -> EncoderRun:
    """Train the BIO baseline; validation defaults to the training corpus
    (the smoke-scale overfit check)."""
    if (val_corpus_path is None) != (val_token_table_path is None):
        raise CorpusFormatError(
            "pass both --val-corpus and --val-token-table or neither"
        )
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    train_docs = read_tokenized_corpus(train_corpus_path, train_token_table_path)
    if not train_docs or all(len(d.tokens) == 0 for d in train_docs):
        raise EmptyCorpusError(f"{train_corpus_path}: no tokens to train on")
    if val_corpus_path is None:
        val_corpus_path = train_corpus_path
        val_docs = train_docs
    else:
        val_docs = read_tokenized_corpus(val_corpus_path, val_token_table_path)

    vocab = PieceVocab.build([doc.tokens for doc in train_docs])
    longest_word = max(
        (len(t) for doc in train_docs + val_docs for t in doc.tokens), default=1
    )
    max_pieces = config.max_input_length * max(2, longest_word)
    model = build_model(len(vocab), max_pieces, config.seed)
    n_parameters = sum(p.numel() for p in model.parameters())
    assert n_parameters < 200_000_000, "encoder preset must stay small"

    windows = make_windows(train_docs, vocab, config.max_input_length)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.encoder_learning_rate())

    best_score = float("-inf")
    best_epoch = -1
    best_state = None
    epoch_scores: list[float | None] = []
    predictions_path = out / "predictions.jsonl"

    for epoch in range(1, config.epochs + 1):
        model.train()
        total_loss = 0.0
        for _, input_ids, attention, labels in _window_batches(
            windows, batch_size, vocab.vocab.pad_id
        ):
            optimizer.zero_grad()
            loss = model(
                input_ids=input_ids, attention_mask=attention, labels=labels
            ).loss
            loss.backward()
            optimizer.step()
            total_loss += loss.item()
        logger.info("epoch %d: train loss %.4f", epoch, total_loss)

        if epoch % config.eval_every and epoch != config.epochs:
            epoch_scores.append(None)
            continue
        predictions = predict_corpus_tags(
            model, val_docs, vocab, config.max_input_length, batch_size
        )
        epoch_predictions = out / f"predictions-epoch{epoch}.jsonl"
        write_predictions(epoch_predictions, predictions)
        report = run_evaluator(
            config.acdkit_bin,
            val_corpus_path,
            out / f"eval-epoch{epoch}",
            predictions=epoch_predictions,
        )
        score = macro_f1(report)
        epoch_scores.append(score)
        logger.info("epoch %d: val macro F1 %.4f", epoch, score)
        if score > best_score:
            best_score = score
            best_epoch = epoch
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
            predictions_path.write_text(
                epoch_predictions.read_text(encoding="utf-8"), encoding="utf-8"
            )

    model_dir = out / "model"
    model_dir.mkdir(exist_ok=True)
    if best_state is not None:
        model.load_state_dict(best_state)
    torch.save(model.state_dict(), model_dir / "weights.pt")
    (model_dir / "vocab.json").write_text(
        json.dumps(vocab.vocab.symbol_to_id, ensure_ascii=False), encoding="utf-8"
    )
    summary = {
        "base_model_id": config.base_model_id,
        "n_parameters": n_parameters,
        "epochs": config.epochs,
        "learning_rate": config.encoder_learning_rate(),
        "max_input_length": config.max_input_length,
        "epoch_val_macro_f1": epoch_scores,
        "selected_epoch": best_epoch,
        "selected_val_macro_f1": best_score,
        "checkpoint_metric": "validation macro F1 (pipeline evaluator)",
    }
    (out / "run.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    return EncoderRun(
        model_dir=model_dir,
        predictions_path=predictions_path,
        selected_epoch=best_epoch,
        epoch_scores=epoch_scores,
        n_parameters=n_parameters,
    )
