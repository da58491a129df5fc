"""Command-line entry point.

Subcommands: convert, stats, split, export-train, predict, evaluate,
report. Exit codes: 0 success, 1 usage/config error, 2 data error,
3 backend error. Credentials are read from the environment only.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from acdkit.config import RunConfig, load_config
from acdkit.corpus.interchange import read_corpus, write_corpus
from acdkit.corpus.model import SourceCorpus
from acdkit.corpus.ops import corpus_stats, split, stats_by_source
from acdkit.corpus.reference import cross_check_stats, reference_consistency_findings
from acdkit.corpus.standoff import parse_standoff
from acdkit.corpus.tokentable import format_token_table, parse_token_table_file
from acdkit.errors import AcdError, BackendError, ConfigError, DataError
from acdkit.evaluation import render_human_report, render_machine_report
from acdkit.inference import TranscriptStore
from acdkit.pipeline import (
    evaluate_corpus,
    evaluate_predictions,
    predict_corpus,
    read_predictions,
)
from acdkit.prompting import export_training_pairs, get_template, write_pairs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


def _source_corpus(name: str) -> SourceCorpus:
    try:
        return SourceCorpus(name)
    except ValueError:
        raise ConfigError(
            f"unknown source corpus {name!r}; "
            f"choose from {[c.value for c in SourceCorpus]}"
        ) from None


def _load_config_arg(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return RunConfig()


def cmd_convert(args: argparse.Namespace) -> int:
    source = _source_corpus(args.source_corpus)
    docs = []
    errors: list[str] = []
    inputs: list[Path] = []
    for raw in args.inputs:
        path = Path(raw)
        if path.is_dir():
            pattern = "*.txt" if args.format == "standoff" else "*"
            inputs.extend(sorted(p for p in path.glob(pattern) if p.is_file()))
        else:
            inputs.append(path)

    for path in inputs:
        try:
            if args.format == "standoff":
                ann_path = path.with_suffix(".ann")
                if path.suffix != ".txt" or not ann_path.exists():
                    continue
                docs.append(
                    parse_standoff(
                        path.read_text(encoding="utf-8"),
                        ann_path.read_text(encoding="utf-8"),
                        doc_id=path.stem,
                        source_corpus=source,
                    )
                )
            elif args.format == "token-table":
                docs.extend(
                    parse_token_table_file(
                        path.read_text(encoding="utf-8"),
                        source_corpus=source,
                        id_prefix=path.stem,
                        strict=args.strict,
                    )
                )
            else:  # canonical: validate and pass through
                docs.extend(read_corpus(path))
        except AcdError as exc:
            errors.append(f"{path}: {exc}")

    if args.to == "token-table":
        Path(args.output).write_text(format_token_table(docs), encoding="utf-8")
    else:
        write_corpus(docs, args.output)
    print(f"wrote {len(docs)} documents to {args.output}")
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    docs = []
    for path in args.corpus:
        docs.extend(read_corpus(path))
    per_source = stats_by_source(docs)
    total = corpus_stats(docs)

    if args.json:
        payload = {
            source: {
                "tag_counts": stats.tag_counts,
                "span_counts": stats.span_counts,
                "documents": stats.n_documents,
                "tokens": stats.n_tokens,
            }
            for source, stats in {**per_source, "Total": total}.items()
        }
        payload["cross_check"] = [
            {"corpus": f.corpus, "severity": f.severity, "message": f.message}
            for f in cross_check_stats(per_source) + reference_consistency_findings()
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK

    header = f"{'corpus':<20} {'docs':>6} {'tokens':>9} " + " ".join(
        f"{t:>10}" for t in ("O", "B-Premise", "I-Premise", "B-Claim", "I-Claim")
    ) + f" {'claims':>7} {'premises':>8}"
    print(header)
    rows = list(per_source.items()) + [("Total", total)]
    for source, stats in rows:
        tag = stats.tag_counts
        print(
            f"{source:<20} {stats.n_documents:>6} {stats.n_tokens:>9} "
            f"{tag['O']:>10} {tag['B-Premise']:>10} {tag['I-Premise']:>10} "
            f"{tag['B-Claim']:>10} {tag['I-Claim']:>10} "
            f"{stats.span_counts['Claim']:>7} {stats.span_counts['Premise']:>8}"
        )
    print()
    print("published-statistics cross-check:")
    for finding in cross_check_stats(per_source) + reference_consistency_findings():
        print(f"  [{finding.severity}] {finding.corpus}: {finding.message}")
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    docs = read_corpus(args.corpus)
    ratios = tuple(float(r) for r in args.ratios.split(","))
    if len(ratios) != 3:
        raise ConfigError(f"--ratios needs three comma-separated values, got {args.ratios}")
    train, dev, test = split(docs, ratios, args.seed)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        write_corpus(part, out / f"{name}.jsonl")
        print(f"{name}: {len(part)} documents")
    return EXIT_OK


def cmd_export_train(args: argparse.Namespace) -> int:
    config = _load_config_arg(args)
    docs = read_corpus(args.corpus)
    template = get_template(args.template or config.template_version)
    pairs = export_training_pairs(
        docs,
        template,
        budget=args.budget or config.chunk_budget,
        safety_factor=args.safety_factor or config.safety_factor,
    )
    n = write_pairs(pairs, args.output)
    print(f"wrote {n} training pairs to {args.output}")
    return EXIT_OK


def _apply_backend_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    update = {}
    if getattr(args, "backend", None):
        update["kind"] = args.backend
    if getattr(args, "endpoint_url", None):
        update["endpoint_url"] = args.endpoint_url
    if getattr(args, "backend_id", None):
        update["backend_id"] = args.backend_id
    if getattr(args, "parallelism", None):
        update["parallelism"] = args.parallelism
    if getattr(args, "replay_path", None):
        update["replay_path"] = args.replay_path
    if not update:
        return config
    return config.model_copy(
        update={"backend": config.backend.model_copy(update=update)}
    )


def cmd_predict(args: argparse.Namespace) -> int:
    config = _apply_backend_flags(_load_config_arg(args), args)
    docs = read_corpus(args.corpus)
    store = TranscriptStore(args.transcript)
    records = predict_corpus(docs, config, store)
    failures = [r for r in records if not r.ok]
    print(
        f"{len(records)} chunks, {len(records) - len(failures)} ok, "
        f"{len(failures)} failed -> {args.transcript}"
    )
    for record in failures:
        print(
            f"failed: {record.doc_id}#{record.chunk_index}: {record.error}",
            file=sys.stderr,
        )
    return EXIT_BACKEND if failures else EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load_config_arg(args)
    if args.allow_partial:
        config = config.model_copy(
            update={
                "evaluation": config.evaluation.model_copy(
                    update={"allow_partial": True}
                )
            }
        )
    if bool(args.transcript) == bool(args.predictions):
        raise ConfigError("evaluate needs exactly one of --transcript/--predictions")
    docs = read_corpus(args.corpus)
    if args.predictions:
        artifacts = evaluate_predictions(
            docs, config, read_predictions(args.predictions)
        )
    else:
        store = TranscriptStore(args.transcript)
        artifacts = evaluate_corpus(docs, config, store)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    machine_path = out / "report.json"
    machine_path.write_text(
        render_machine_report(artifacts.report) + "\n", encoding="utf-8"
    )
    human_path = out / "report.md"
    human_path.write_text(
        render_human_report(artifacts.report, artifacts.discrepancy_examples),
        encoding="utf-8",
    )
    alignments_path = out / "alignments.jsonl"
    with alignments_path.open("w", encoding="utf-8") as fh:
        for row in artifacts.alignment_rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")

    print(f"macro F1: {artifacts.report.macro_f1:.4f}")
    print(f"accuracy: {artifacts.report.accuracy:.4f}")
    if artifacts.skipped_chunks:
        print(f"skipped {len(artifacts.skipped_chunks)} chunks without transcripts")
    print(f"reports in {out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    payload = json.loads(Path(args.machine_report).read_text(encoding="utf-8"))
    from acdkit.evaluation import ClassScores, EvalReport

    report = EvalReport(
        class_scores={
            tag: ClassScores(
                precision=s["precision"],
                recall=s["recall"],
                f1=s["f1"],
                support=s["support"],
            )
            for tag, s in payload["class_scores"].items()
        },
        macro_f1=payload["macro_f1"],
        accuracy=payload["accuracy"],
        confusion=tuple(tuple(row) for row in payload["confusion"]),
        discrepancy_tally=payload.get("discrepancy_tally", {}),
        span_counts=tuple(payload.get("span_counts", (0, 0, 0))),
        span_exact_f1=payload.get("span_exact_f1_supplementary", 0.0),
        macro_includes_o=payload.get("macro_includes_o", True),
        flags=tuple(payload.get("flags", ())),
        metadata=payload.get("metadata", {}),
    )
    examples: dict[str, str] = {}
    if args.alignments and Path(args.alignments).exists():
        with Path(args.alignments).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                for rec in row.get("discrepancies", []):
                    examples.setdefault(
                        rec["kind"],
                        f"{row['doc_id']}#{row['chunk_index']}: {rec['note']}",
                    )
    text = render_human_report(report, examples)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acdkit",
        description=(
            "Argumentative component detection pipeline: ingest corpora, "
            "export instruction-tuning pairs, generate, align, and score."
        ),
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="ingest external formats to canonical JSONL")
    p.add_argument("inputs", nargs="*", help="files or directories")
    p.add_argument("--format", choices=["standoff", "token-table", "canonical"], required=True)
    p.add_argument(
        "--to",
        choices=["canonical", "token-table"],
        default="canonical",
        help="output format (token-table exposes the pipeline's tokenization)",
    )
    p.add_argument("--source-corpus", default="Synthetic")
    p.add_argument("--strict", action="store_true", help="reject BIO violations")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="BIO statistics and published-table cross-check")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="deterministic train/dev/test split")
    p.add_argument("corpus")
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("export-train", help="export (plain, tagged) training pairs")
    p.add_argument("corpus")
    p.add_argument("--config")
    p.add_argument("--template")
    p.add_argument("--budget", type=int)
    p.add_argument("--safety-factor", type=float, dest="safety_factor")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export_train)

    p = sub.add_parser("predict", help="generate tagged text for every chunk")
    p.add_argument("corpus")
    p.add_argument("--config")
    p.add_argument("--transcript", required=True)
    p.add_argument("--backend", choices=["http", "echo", "gold-replay", "perturb", "replay"])
    p.add_argument("--endpoint-url", dest="endpoint_url")
    p.add_argument("--backend-id", dest="backend_id")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--replay-path", dest="replay_path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser(
        "evaluate", help="score a transcript or a token-predictions file"
    )
    p.add_argument("corpus")
    p.add_argument("--config")
    p.add_argument("--transcript")
    p.add_argument("--predictions", help="per-token BIO predictions JSONL")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="re-render the human report from a machine report")
    p.add_argument("--machine-report", required=True)
    p.add_argument("--alignments")
    p.add_argument("--output")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AcdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
