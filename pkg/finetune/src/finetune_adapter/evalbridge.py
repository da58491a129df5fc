"""Bridge to the pipeline evaluator.

Metrics are never computed in this package. Transcripts and prediction
files are written in the pipeline's wire formats, the pipeline CLI is
invoked, and macro F1 is read back from its machine report. Transcript
records are keyed by the documented content hash over (prompt, decoding
params, backend id, template version).
"""

from __future__ import annotations

import hashlib
import json
import subprocess
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path


class EvaluatorError(RuntimeError):
    pass


@dataclass(frozen=True)
class DecodingContract:
    """Decoding fields as the evaluator will hash them."""

    temperature: float = 0.01
    top_p: float = 0.1
    max_output_tokens: int = 2048


def transcript_prompt_hash(
    prompt: str,
    decoding: DecodingContract,
    backend_id: str,
    template_version: str,
) -> str:
    payload = json.dumps(
        {
            "prompt": prompt,
            "temperature": decoding.temperature,
            "top_p": decoding.top_p,
            "max_output_tokens": decoding.max_output_tokens,
            "backend_id": backend_id,
            "template_version": template_version,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def write_transcript(
    path: str | Path,
    rows: list[dict],
    backend_id: str,
    decoding: DecodingContract = DecodingContract(),
) -> int:
    """rows: {prompt, output, doc_id, chunk_index, template_version}."""
    path = Path(path)
    now = datetime.now(timezone.utc).isoformat()
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            record = {
                "prompt_hash": transcript_prompt_hash(
                    row["prompt"], decoding, backend_id, row["template_version"]
                ),
                "backend_id": backend_id,
                "temperature": decoding.temperature,
                "top_p": decoding.top_p,
                "max_output_tokens": decoding.max_output_tokens,
                "output": row["output"].rstrip(),
                "latency_s": row.get("latency_s", 0.0),
                "timestamp": now,
                "truncated": row.get("truncated", False),
                "error": None,
                "doc_id": row["doc_id"],
                "chunk_index": row["chunk_index"],
                "template_version": row["template_version"],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return len(rows)


def write_predictions(path: str | Path, predictions: dict[str, list[str]]) -> int:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, tags in predictions.items():
            fh.write(json.dumps({"doc_id": doc_id, "tags": tags}) + "\n")
    return len(predictions)


def run_evaluator(
    acdkit_bin: str,
    corpus_path: str | Path,
    output_dir: str | Path,
    *,
    transcript: str | Path | None = None,
    predictions: str | Path | None = None,
    config: str | Path | None = None,
) -> dict:
    """Invoke the pipeline evaluator and return its machine report."""
    cmd = [acdkit_bin, "evaluate", str(corpus_path), "--output-dir", str(output_dir)]
    if transcript is not None:
        cmd += ["--transcript", str(transcript)]
    if predictions is not None:
        cmd += ["--predictions", str(predictions)]
    if config is not None:
        cmd += ["--config", str(config)]
    started = time.perf_counter()
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise EvaluatorError(
            f"evaluator exited {proc.returncode} after "
            f"{time.perf_counter() - started:.1f}s: {proc.stderr.strip()}"
        )
    report_path = Path(output_dir) / "report.json"
    return json.loads(report_path.read_text(encoding="utf-8"))


def macro_f1(report: dict) -> float:
    return float(report["macro_f1"])
