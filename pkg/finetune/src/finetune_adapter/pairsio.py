"""Training-pair file reader with schema validation.

The pairs file is the sole contract with the pipeline's exporter: JSONL
records {doc_id, chunk_index, instruction, input, target,
template_version}. Violations are rejected before any training starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class PairsSchemaError(ValueError):
    pass


_REQUIRED_FIELDS = {
    "doc_id": str,
    "chunk_index": int,
    "instruction": str,
    "input": str,
    "target": str,
    "template_version": str,
}


@dataclass(frozen=True)
class Pair:
    doc_id: str
    chunk_index: int
    instruction: str
    input: str
    target: str
    template_version: str


def read_pairs(path: str | Path) -> list[Pair]:
    pairs: list[Pair] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PairsSchemaError(f"{path}:{lineno}: not JSON: {exc}") from None
            if not isinstance(record, dict):
                raise PairsSchemaError(f"{path}:{lineno}: record must be an object")
            for field_name, field_type in _REQUIRED_FIELDS.items():
                if field_name not in record:
                    raise PairsSchemaError(
                        f"{path}:{lineno}: missing field {field_name!r}"
                    )
                if not isinstance(record[field_name], field_type):
                    raise PairsSchemaError(
                        f"{path}:{lineno}: field {field_name!r} must be "
                        f"{field_type.__name__}"
                    )
            if record["instruction"].count(record["input"]) == 0:
                raise PairsSchemaError(
                    f"{path}:{lineno}: instruction does not embed the input chunk"
                )
            pairs.append(Pair(**{k: record[k] for k in _REQUIRED_FIELDS}))
    if not pairs:
        raise PairsSchemaError(f"{path}: no training pairs found")
    return pairs
