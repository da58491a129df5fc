"""Command-line entry point for the fine-tuning adapter."""

from __future__ import annotations

import argparse
import logging
import sys

from finetune_adapter.config import AdapterConfigError, TuneConfig
from finetune_adapter.corpusio import CorpusFormatError
from finetune_adapter.encoder import EmptyCorpusError, tune_encoder_baseline
from finetune_adapter.evalbridge import EvaluatorError
from finetune_adapter.generative import tune_generative
from finetune_adapter.pairsio import PairsSchemaError


def _tune_config(args: argparse.Namespace, base_model_id: str) -> TuneConfig:
    return TuneConfig(
        base_model_id=base_model_id,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=getattr(args, "batch_size", None),
        max_input_length=getattr(args, "max_input_length", 64),
        max_new_tokens=getattr(args, "max_new_tokens", 256),
        eval_every=args.eval_every,
        seed=args.seed,
        acdkit_bin=args.acdkit_bin,
    )


def cmd_generative(args: argparse.Namespace) -> int:
    config = _tune_config(args, "tiny-gpt2")
    run = tune_generative(
        args.train_pairs,
        args.dev_pairs,
        args.dev_corpus,
        args.output_dir,
        config,
        eval_config_path=args.eval_config,
    )
    print(
        f"selected epoch {run.selected_epoch} "
        f"({run.n_parameters} parameters); transcript: {run.transcript_path}"
    )
    return 0


def cmd_encoder(args: argparse.Namespace) -> int:
    config = _tune_config(args, "tiny-encoder")
    run = tune_encoder_baseline(
        args.train_corpus,
        args.train_token_table,
        args.output_dir,
        config,
        val_corpus_path=args.val_corpus,
        val_token_table_path=args.val_token_table,
        batch_size=args.batch_size or 16,
    )
    print(
        f"selected epoch {run.selected_epoch} "
        f"({run.n_parameters} parameters); predictions: {run.predictions_path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acd-finetune",
        description="Smoke-scale tuning of small from-scratch models on "
        "pipeline-exported data; evaluation defers to the pipeline CLI.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generative", help="instruction-tune a tiny causal LM")
    p.add_argument("--train-pairs", required=True)
    p.add_argument("--dev-pairs", required=True)
    p.add_argument("--dev-corpus", required=True, help="canonical corpus for scoring")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--max-new-tokens", type=int, default=256)
    p.add_argument("--eval-every", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-config", help="run config forwarded to the evaluator")
    p.add_argument("--acdkit-bin", default="acdkit")
    p.set_defaults(func=cmd_generative)

    p = sub.add_parser("encoder", help="train the token-classification BIO baseline")
    p.add_argument("--train-corpus", required=True, help="canonical corpus (ids)")
    p.add_argument(
        "--train-token-table",
        required=True,
        help="same corpus via `acdkit convert --to token-table`",
    )
    p.add_argument("--val-corpus")
    p.add_argument("--val-token-table")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-input-length", type=int, default=64)
    p.add_argument("--eval-every", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--acdkit-bin", default="acdkit")
    p.set_defaults(func=cmd_encoder)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (AdapterConfigError, PairsSchemaError, CorpusFormatError, EmptyCorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EvaluatorError as exc:
        print(f"evaluator error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
