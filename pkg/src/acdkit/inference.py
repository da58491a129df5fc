"""Completion backends, batched generation, and the transcript store.

The transcript store is an append-only JSONL file that doubles as the
generation cache: records are keyed by a content hash of (prompt, params,
backend id, template version), loads are last-record-wins per hash, and a
stored record counts as a cache hit only if it carries no error, so
failed prompts are retried on the next run while successes replay
byte-identically.

Backends speak a minimal protocol: ``complete(request) -> (text,
truncated)``. The HTTP backend talks the common chat-completion wire
format (single user message; temperature, top_p, max_tokens fields). The
test backends (replay, echo, gold replay, scripted perturbation) read the
request's metadata instead of calling anything.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from acdkit.errors import BackendError, TranscriptError

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.01
DEFAULT_TOP_P = 0.1
DEFAULT_MAX_OUTPUT_TOKENS = 2048


@dataclass(frozen=True, slots=True)
class DecodingParams:
    """Near-deterministic decoding defaults; greedy (t=0) is the stricter
    documented variant."""

    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True, slots=True)
class CompletionRequest:
    """A prompt plus side-channel metadata for the test backends."""

    prompt: str
    params: DecodingParams
    meta: dict = field(default_factory=dict)


def prompt_hash(
    prompt: str,
    params: DecodingParams,
    backend_id: str,
    template_version: str = "",
) -> str:
    payload = json.dumps(
        {
            "prompt": prompt,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_output_tokens": params.max_output_tokens,
            "backend_id": backend_id,
            "template_version": template_version,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True, slots=True)
class GenerationRecord:
    prompt_hash: str
    backend_id: str
    params: DecodingParams
    output: str
    latency_s: float
    timestamp: str
    truncated: bool = False
    error: str | None = None
    doc_id: str = ""
    chunk_index: int = -1
    template_version: str = ""

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_record(self) -> dict:
        return {
            "prompt_hash": self.prompt_hash,
            "backend_id": self.backend_id,
            "temperature": self.params.temperature,
            "top_p": self.params.top_p,
            "max_output_tokens": self.params.max_output_tokens,
            "output": self.output,
            "latency_s": self.latency_s,
            "timestamp": self.timestamp,
            "truncated": self.truncated,
            "error": self.error,
            "doc_id": self.doc_id,
            "chunk_index": self.chunk_index,
            "template_version": self.template_version,
        }

    @classmethod
    def from_record(cls, record: dict) -> "GenerationRecord":
        return cls(
            prompt_hash=record["prompt_hash"],
            backend_id=record["backend_id"],
            params=DecodingParams(
                temperature=record["temperature"],
                top_p=record["top_p"],
                max_output_tokens=record["max_output_tokens"],
            ),
            output=record["output"],
            latency_s=record["latency_s"],
            timestamp=record["timestamp"],
            truncated=record.get("truncated", False),
            error=record.get("error"),
            doc_id=record.get("doc_id", ""),
            chunk_index=record.get("chunk_index", -1),
            template_version=record.get("template_version", ""),
        )


class TransientBackendFailure(Exception):
    """Retryable transport-level failure."""


class Backend(Protocol):
    backend_id: str

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        """Return (output text, truncated flag)."""
        ...


class ChatCompletionBackend:
    """HTTP backend for any endpoint speaking the chat-completion format."""

    def __init__(
        self,
        endpoint_url: str,
        backend_id: str,
        api_key_env: str = "ACD_API_KEY",
        timeout_s: float = 120.0,
        client: httpx.Client | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.backend_id = backend_id
        self.api_key_env = api_key_env
        self._client = client or httpx.Client(timeout=timeout_s)

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": self.backend_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "max_tokens": request.params.max_output_tokens,
        }
        try:
            response = self._client.post(self.endpoint_url, json=body, headers=headers)
        except httpx.HTTPError as exc:
            raise TransientBackendFailure(f"transport error: {exc}") from exc
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientBackendFailure(f"HTTP {response.status_code}")
        if response.status_code != 200:
            raise BackendError(
                f"HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            payload = response.json()
            choice = payload["choices"][0]
            text = choice["message"]["content"] or ""
            truncated = choice.get("finish_reason") == "length"
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from None
        return text, truncated


class ReplayBackend:
    """Returns pre-recorded outputs; raises on unknown prompts."""

    backend_id = "replay"

    def __init__(self, outputs: dict[str, str]):
        self._outputs = dict(outputs)

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        try:
            return self._outputs[request.prompt], False
        except KeyError:
            raise BackendError("replay backend has no output for this prompt") from None


class TranscriptReplayBackend:
    """Serves outputs recorded in an existing transcript file.

    Re-derives each prompt's hash under the transcript's own backend id
    (one transcript, one backend), so a replayed run needs no network and
    fails loudly on any prompt the transcript does not cover.
    """

    def __init__(self, path: str | Path):
        self._store = TranscriptStore(path)
        ids = {r.backend_id for r in self._store.records()}
        if len(ids) > 1:
            raise TranscriptError(
                f"replay transcript {path} mixes backends {sorted(ids)}"
            )
        self.backend_id = next(iter(ids)) if ids else "replay"

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        key = prompt_hash(
            request.prompt,
            request.params,
            self.backend_id,
            request.meta.get("template_version", ""),
        )
        record = self._store.cached(key)
        if record is None:
            raise BackendError("prompt not present in replay transcript")
        return record.output, record.truncated


class EchoBackend:
    """Returns the input chunk untouched: the all-O baseline."""

    backend_id = "echo"

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        return request.meta.get("input_text", request.prompt), False


class GoldReplayBackend:
    """Returns the gold tagged text: the perfect-model oracle."""

    backend_id = "gold-replay"

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        try:
            return request.meta["gold_tagged"], False
        except KeyError:
            raise BackendError("request meta carries no gold_tagged text") from None


class PerturbationBackend:
    """Scripted noise over the gold tagged text.

    Deterministic per (seed, prompt). Applies tag-kind flips, tag drops,
    word insertions inside spans, and case flips; when guarantee_change is
    set, outputs with at least one tag always receive at least one
    label-affecting perturbation, so downstream scores are strictly
    below 1.
    """

    backend_id = "perturb"

    _TAG_PAIR_RE = re.compile(
        r"<(claim|premise)>(.*?)</\1>", re.IGNORECASE | re.DOTALL
    )

    def __init__(
        self,
        seed: int = 0,
        kind_flip_rate: float = 0.3,
        drop_rate: float = 0.1,
        insert_rate: float = 0.2,
        case_flip_rate: float = 0.2,
        guarantee_change: bool = True,
    ):
        self.seed = seed
        self.kind_flip_rate = kind_flip_rate
        self.drop_rate = drop_rate
        self.insert_rate = insert_rate
        self.case_flip_rate = case_flip_rate
        self.guarantee_change = guarantee_change

    def complete(self, request: CompletionRequest) -> tuple[str, bool]:
        gold = request.meta.get("gold_tagged")
        if gold is None:
            raise BackendError("request meta carries no gold_tagged text")
        rng = random.Random(
            f"{self.seed}:{hashlib.sha256(request.prompt.encode()).hexdigest()}"
        )
        changed = False
        parts: list[str] = []
        pos = 0
        for m in self._TAG_PAIR_RE.finditer(gold):
            parts.append(gold[pos : m.start()])
            kind, inner = m.group(1).lower(), m.group(2)
            roll = rng.random()
            if roll < self.drop_rate:
                parts.append(inner)  # tags dropped, text kept
                changed = True
            else:
                if roll < self.drop_rate + self.kind_flip_rate:
                    kind = "premise" if kind == "claim" else "claim"
                    changed = True
                if rng.random() < self.insert_rate:
                    words = inner.split(" ")
                    if len(words) > 2:
                        slot = rng.randrange(1, len(words) - 1)
                        words.insert(slot, rng.choice(["really", "just", "simply"]))
                        inner = " ".join(words)
                        changed = True
                if rng.random() < self.case_flip_rate:
                    words = inner.split(" ")
                    slot = rng.randrange(len(words))
                    if words[slot] and words[slot][0].isalpha():
                        words[slot] = words[slot][0].swapcase() + words[slot][1:]
                        inner = " ".join(words)
                parts.append(f"<{kind}>{inner}</{kind}>")
            pos = m.end()
        parts.append(gold[pos:])
        if not changed and self.guarantee_change:
            rebuilt = self._flip_first_tag(gold)
            if rebuilt is not None:
                return rebuilt, False
        return "".join(parts), False

    def _flip_first_tag(self, gold: str) -> str | None:
        m = self._TAG_PAIR_RE.search(gold)
        if m is None:
            return None
        kind = m.group(1).lower()
        flipped = "premise" if kind == "claim" else "claim"
        return (
            gold[: m.start()]
            + f"<{flipped}>{m.group(2)}</{flipped}>"
            + gold[m.end() :]
        )


class TranscriptStore:
    """Append-only JSONL record store with last-wins compaction on load.

    Appends are serialized by a lock and flushed; a truncated trailing
    line (crash mid-write) is skipped with a warning on load so a resumed
    run regenerates exactly the missing prompts.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._by_hash: dict[str, GenerationRecord] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        lines = self.path.read_text(encoding="utf-8").splitlines()
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                record = GenerationRecord.from_record(json.loads(line))
            except (json.JSONDecodeError, KeyError) as exc:
                if lineno == len(lines):
                    # crash-torn final record: drop it from the file so the
                    # next append starts on a clean line
                    logger.warning(
                        "%s: dropping truncated final record (%s)", self.path, exc
                    )
                    good = "\n".join(lines[:-1])
                    self.path.write_text(
                        good + ("\n" if good else ""), encoding="utf-8"
                    )
                    continue
                raise TranscriptError(
                    f"{self.path}:{lineno}: corrupt transcript record: {exc}"
                ) from None
            self._by_hash[record.prompt_hash] = record

    def __len__(self) -> int:
        return len(self._by_hash)

    def get(self, prompt_hash_value: str) -> GenerationRecord | None:
        with self._lock:
            return self._by_hash.get(prompt_hash_value)

    def cached(self, prompt_hash_value: str) -> GenerationRecord | None:
        """A usable cache hit: present and error-free."""
        record = self.get(prompt_hash_value)
        return record if record is not None and record.ok else None

    def append(self, record: GenerationRecord) -> None:
        with self._lock:
            self._by_hash[record.prompt_hash] = record
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_record(), ensure_ascii=False) + "\n")
                fh.flush()

    def records(self) -> list[GenerationRecord]:
        with self._lock:
            return list(self._by_hash.values())


def generate(
    prompt: str,
    params: DecodingParams,
    backend: Backend,
    *,
    meta: dict | None = None,
    store: TranscriptStore | None = None,
    retries: int = 2,
    retry_wait_s: float = 0.25,
    template_version: str = "",
    doc_id: str = "",
    chunk_index: int = -1,
    sleep: Callable[[float], None] = time.sleep,
) -> GenerationRecord:
    """One completion with caching and bounded retries.

    The output is kept verbatim except for trailing whitespace. Transport
    failures are retried up to ``retries`` extra attempts; exhausting
    them raises BackendError. Truncation is flagged on the record, never
    fatal.
    """
    key = prompt_hash(prompt, params, backend.backend_id, template_version)
    if store is not None:
        hit = store.cached(key)
        if hit is not None:
            return hit

    request = CompletionRequest(prompt=prompt, params=params, meta=meta or {})
    attempts = 1 + max(0, retries)
    last_failure: Exception | None = None
    for attempt in range(attempts):
        start = time.perf_counter()
        try:
            output, truncated = backend.complete(request)
        except TransientBackendFailure as exc:
            last_failure = exc
            logger.warning(
                "backend %s attempt %d/%d failed: %s",
                backend.backend_id,
                attempt + 1,
                attempts,
                exc,
            )
            if attempt + 1 < attempts:
                sleep(retry_wait_s * (2**attempt))
            continue
        record = GenerationRecord(
            prompt_hash=key,
            backend_id=backend.backend_id,
            params=params,
            output=output.rstrip(),
            latency_s=time.perf_counter() - start,
            timestamp=datetime.now(timezone.utc).isoformat(),
            truncated=truncated,
            doc_id=doc_id,
            chunk_index=chunk_index,
            template_version=template_version,
        )
        if store is not None:
            store.append(record)
        return record
    raise BackendError(
        f"backend {backend.backend_id} failed after {attempts} attempts: "
        f"{last_failure}"
    )


@dataclass(frozen=True, slots=True)
class BatchItem:
    prompt: str
    meta: dict = field(default_factory=dict)
    doc_id: str = ""
    chunk_index: int = -1


def run_batch(
    items: Sequence[BatchItem],
    params: DecodingParams,
    backend: Backend,
    *,
    parallelism: int = 1,
    store: TranscriptStore | None = None,
    retries: int = 2,
    retry_wait_s: float = 0.25,
    template_version: str = "",
    sleep: Callable[[float], None] = time.sleep,
) -> list[GenerationRecord]:
    """Run many completions; output order always matches input order.

    A prompt that still fails after retries yields an error-marked record
    (not persisted as a success) and the batch completes.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")

    def run_one(item: BatchItem) -> GenerationRecord:
        try:
            return generate(
                item.prompt,
                params,
                backend,
                meta=item.meta,
                store=store,
                retries=retries,
                retry_wait_s=retry_wait_s,
                template_version=template_version,
                doc_id=item.doc_id,
                chunk_index=item.chunk_index,
                sleep=sleep,
            )
        except BackendError as exc:
            record = GenerationRecord(
                prompt_hash=prompt_hash(
                    item.prompt, params, backend.backend_id, template_version
                ),
                backend_id=backend.backend_id,
                params=params,
                output="",
                latency_s=0.0,
                timestamp=datetime.now(timezone.utc).isoformat(),
                error=str(exc),
                doc_id=item.doc_id,
                chunk_index=item.chunk_index,
                template_version=template_version,
            )
            if store is not None:
                store.append(record)
            return record

    if parallelism == 1 or len(items) <= 1:
        return [run_one(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(run_one, items))
