"""In-process pipeline: chunk -> prompt -> generate -> align -> score.

The CLI's predict and evaluate subcommands are thin wrappers over these
functions, so "predict then evaluate" through files is the same
computation as one in-process run.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from acdkit import align as align_mod
from acdkit.config import RunConfig, config_hash
from acdkit.corpus.bio import spans_to_bio
from acdkit.corpus.model import LabeledDocument
from acdkit.corpus.tokenizer import tokenize
from acdkit.errors import BackendError, TranscriptError
from acdkit.evaluation import EvalReport, evaluate
from acdkit.inference import (
    Backend,
    BatchItem,
    ChatCompletionBackend,
    DecodingParams,
    EchoBackend,
    GenerationRecord,
    GoldReplayBackend,
    PerturbationBackend,
    TranscriptReplayBackend,
    TranscriptStore,
    prompt_hash,
    run_batch,
)
from acdkit.prompting import (
    Chunk,
    chunk_document,
    chunk_spans,
    chunk_tokens,
    effective_budget,
    encode_chunk,
    get_template,
    render_prompt,
)
from acdkit.tagcodec import decode_xml

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChunkJob:
    doc: LabeledDocument
    chunk: Chunk
    prompt: str
    gold_tagged: str


def decoding_params(config: RunConfig) -> DecodingParams:
    return DecodingParams(
        temperature=config.decoding.temperature,
        top_p=config.decoding.top_p,
        max_output_tokens=config.decoding.max_output_tokens,
    )


def build_backend(config: RunConfig) -> Backend:
    backend = config.backend
    if backend.kind == "http":
        if not backend.endpoint_url:
            raise BackendError("http backend requires endpoint_url")
        return ChatCompletionBackend(
            endpoint_url=backend.endpoint_url,
            backend_id=backend.backend_id or "default-model",
            api_key_env=backend.api_key_env,
            timeout_s=backend.timeout_s,
        )
    if backend.kind == "echo":
        return EchoBackend()
    if backend.kind == "gold-replay":
        return GoldReplayBackend()
    if backend.kind == "perturb":
        return PerturbationBackend(seed=backend.perturb_seed)
    if backend.kind == "replay":
        if not backend.replay_path:
            raise BackendError("replay backend requires replay_path")
        return TranscriptReplayBackend(backend.replay_path)
    raise BackendError(f"unknown backend kind {backend.kind!r}")


def chunk_jobs(
    docs: Sequence[LabeledDocument], config: RunConfig
) -> list[ChunkJob]:
    template = get_template(config.template_version)
    budget = effective_budget(config.chunk_budget, config.safety_factor)
    jobs: list[ChunkJob] = []
    for doc in docs:
        for chunk in chunk_document(doc, budget):
            jobs.append(
                ChunkJob(
                    doc=doc,
                    chunk=chunk,
                    prompt=render_prompt(template, chunk),
                    gold_tagged=encode_chunk(doc, chunk),
                )
            )
    return jobs


def predict_corpus(
    docs: Sequence[LabeledDocument],
    config: RunConfig,
    store: TranscriptStore,
    backend: Backend | None = None,
) -> list[GenerationRecord]:
    """Generate one record per chunk; cached prompt hashes are skipped."""
    backend = backend or build_backend(config)
    jobs = chunk_jobs(docs, config)
    items = [
        BatchItem(
            prompt=job.prompt,
            meta={
                "input_text": job.chunk.text,
                "gold_tagged": job.gold_tagged,
                "template_version": config.template_version,
            },
            doc_id=job.doc.id,
            chunk_index=job.chunk.index,
        )
        for job in jobs
    ]
    return run_batch(
        items,
        decoding_params(config),
        backend,
        parallelism=config.backend.parallelism,
        store=store,
        retries=config.backend.retries,
        template_version=config.template_version,
    )


@dataclass(frozen=True)
class EvaluationArtifacts:
    report: EvalReport
    alignment_rows: list[dict]
    discrepancy_examples: dict[str, str]
    skipped_chunks: list[str]


def evaluate_corpus(
    docs: Sequence[LabeledDocument],
    config: RunConfig,
    store: TranscriptStore,
) -> EvaluationArtifacts:
    """Score a transcript against gold; requires full coverage unless
    evaluation.allow_partial is set."""
    params = decoding_params(config)
    backend_id = _transcript_backend_id(store, config)
    jobs = chunk_jobs(docs, config)

    gold_seqs: list[list[str]] = []
    pred_seqs: list[list[str]] = []
    ids: list[str] = []
    tally: dict[str, int] = {}
    alignment_rows: list[dict] = []
    examples: dict[str, str] = {}
    skipped: list[str] = []

    for job in jobs:
        key = prompt_hash(job.prompt, params, backend_id, config.template_version)
        record = store.get(key)
        chunk_name = f"{job.doc.id}#{job.chunk.index}"
        if record is None or not record.ok:
            if config.evaluation.allow_partial:
                skipped.append(chunk_name)
                continue
            raise TranscriptError(
                f"no usable transcript record for chunk {chunk_name}; "
                "run predict first or pass allow_partial"
            )
        source_tokens = [t.text for t in chunk_tokens(job.doc, job.chunk)]
        gold = chunk_spans(job.doc, job.chunk)
        outcome = decode_xml(record.output, mode=config.evaluation.parse_mode)
        generated_tokens = [t.text for t in tokenize(outcome.plain_text)]
        analysis = align_mod.analyze(
            source_tokens,
            gold,
            generated_tokens,
            outcome.spans,
            jaccard_threshold=config.evaluation.jaccard_threshold,
        )
        gold_seqs.append(spans_to_bio(len(source_tokens), gold))
        pred_seqs.append(list(analysis.projected_bio))
        ids.append(chunk_name)
        row_discrepancies = []
        for rec in analysis.discrepancies:
            tally[rec.kind.value] = tally.get(rec.kind.value, 0) + 1
            examples.setdefault(rec.kind.value, f"{chunk_name}: {rec.note}")
            row_discrepancies.append({"kind": rec.kind.value, "note": rec.note})
        alignment_rows.append(
            {
                "doc_id": job.doc.id,
                "chunk_index": job.chunk.index,
                "cost": analysis.cost,
                "ops": align_mod.ops_compact(analysis.ops),
                "repairs": [r.kind.value for r in outcome.repairs],
                "discrepancies": row_discrepancies,
            }
        )

    metadata = {
        "config_hash": config_hash(config),
        "backend_id": backend_id,
        "template_version": config.template_version,
        "temperature": params.temperature,
        "top_p": params.top_p,
        "max_output_tokens": params.max_output_tokens,
        "jaccard_threshold": config.evaluation.jaccard_threshold,
        "parse_mode": config.evaluation.parse_mode,
        "skipped_chunks": len(skipped),
    }
    report = evaluate(
        gold_seqs,
        pred_seqs,
        ids,
        macro_includes_o=config.evaluation.macro_includes_o,
        discrepancy_tally=tally,
        metadata=metadata,
    )
    return EvaluationArtifacts(
        report=report,
        alignment_rows=alignment_rows,
        discrepancy_examples=examples,
        skipped_chunks=skipped,
    )


def read_predictions(path: str | Path) -> dict[str, list[str]]:
    """Load a per-token BIO predictions file: JSONL {doc_id, tags}."""
    predictions: dict[str, list[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc_id, tags = record["doc_id"], record["tags"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise TranscriptError(
                    f"{path}:{lineno}: bad prediction record: {exc}"
                ) from None
            if doc_id in predictions:
                raise TranscriptError(
                    f"{path}:{lineno}: duplicate predictions for {doc_id}"
                )
            predictions[doc_id] = list(tags)
    return predictions


def evaluate_predictions(
    docs: Sequence[LabeledDocument],
    config: RunConfig,
    predictions: dict[str, list[str]],
) -> EvaluationArtifacts:
    """Score per-token BIO predictions against gold, no alignment involved.

    This is the evaluation path for token-classification baselines whose
    predictions already live on the source tokens."""
    gold_seqs: list[list[str]] = []
    pred_seqs: list[list[str]] = []
    ids: list[str] = []
    skipped: list[str] = []
    for doc in docs:
        tags = predictions.get(doc.id)
        if tags is None:
            if config.evaluation.allow_partial:
                skipped.append(doc.id)
                continue
            raise TranscriptError(f"no predictions for document {doc.id}")
        gold_seqs.append(spans_to_bio(len(doc.tokens), doc.spans))
        pred_seqs.append(tags)
        ids.append(doc.id)
    covered = set(ids) | set(skipped)
    extra = sorted(set(predictions) - covered)
    if extra:
        raise TranscriptError(f"predictions for unknown documents: {extra[:5]}")
    metadata = {
        "config_hash": config_hash(config),
        "backend_id": "token-predictions",
        "template_version": "",
        "jaccard_threshold": config.evaluation.jaccard_threshold,
        "parse_mode": "none (direct token predictions)",
        "skipped_chunks": len(skipped),
    }
    report = evaluate(
        gold_seqs,
        pred_seqs,
        ids,
        macro_includes_o=config.evaluation.macro_includes_o,
        metadata=metadata,
    )
    return EvaluationArtifacts(
        report=report,
        alignment_rows=[],
        discrepancy_examples={},
        skipped_chunks=skipped,
    )


def _transcript_backend_id(store: TranscriptStore, config: RunConfig) -> str:
    """Prompt hashes embed the backend id; recover it from the transcript
    so evaluate works on transcripts from any backend."""
    records = store.records()
    if records:
        ids = {r.backend_id for r in records}
        if len(ids) > 1:
            raise TranscriptError(
                f"transcript mixes backends {sorted(ids)}; evaluate one at a time"
            )
        return next(iter(ids))
    backend = config.backend
    if backend.kind == "http":
        return backend.backend_id or "default-model"
    return {
        "echo": "echo",
        "gold-replay": "gold-replay",
        "perturb": "perturb",
        "replay": "replay",
    }[backend.kind]
