"""Fixtures build corpora with the pipeline CLI, never in-process imports:
the adapter's contract is files plus the `acdkit` executable."""

from __future__ import annotations

import json
import random
import subprocess
from pathlib import Path

import pytest

WORDS = (
    "the voters need a better plan because taxes rose fast and school "
    "budgets fell while wages stayed flat so reform is overdue now"
).split()


def _make_token_table(rng: random.Random, n_docs: int) -> str:
    """Small BIO-annotated corpus in the token-table input format."""
    blocks = []
    for _ in range(n_docs):
        n = rng.randint(12, 24)
        tokens = [rng.choice(WORDS) for _ in range(n)]
        tokens.append(".")
        tags = ["O"] * len(tokens)
        cursor = 0
        while cursor < n - 2:
            start = cursor + rng.randint(0, 3)
            if start >= n - 1:
                break
            end = min(n - 1, start + rng.randint(1, 4))
            kind = rng.choice(["Claim", "Premise"])
            tags[start] = f"B-{kind}"
            for k in range(start + 1, end + 1):
                tags[k] = f"I-{kind}"
            cursor = end + 2
        blocks.append("\n".join(f"{t}\t{g}" for t, g in zip(tokens, tags)))
    return "\n\n".join(blocks) + "\n"


def run_acdkit(*argv: str) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        ["acdkit", *map(str, argv)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def workspace(tmp_path_factory) -> dict[str, Path]:
    """One shared corpus: 20 train docs and 8 dev docs, exported every way
    the adapter consumes."""
    root = tmp_path_factory.mktemp("adapter-data")
    rng = random.Random(4)

    paths: dict[str, Path] = {}
    for name, n_docs in (("train", 20), ("dev", 8)):
        table = root / f"{name}-source.tsv"
        table.write_text(_make_token_table(rng, n_docs), encoding="utf-8")
        corpus = root / f"{name}.jsonl"
        run_acdkit(
            "convert", table, "--format", "token-table", "--output", corpus
        )
        token_table = root / f"{name}-tokens.tsv"
        run_acdkit(
            "convert", corpus, "--format", "canonical", "--to", "token-table",
            "--output", token_table,
        )
        pairs = root / f"{name}-pairs.jsonl"
        run_acdkit("export-train", corpus, "--output", pairs)
        paths[f"{name}_corpus"] = corpus
        paths[f"{name}_tokens"] = token_table
        paths[f"{name}_pairs"] = pairs

    n_train_pairs = len(paths["train_pairs"].read_text().splitlines())
    assert n_train_pairs >= 20
    return paths


@pytest.fixture(scope="session")
def identity_workspace(tmp_path_factory) -> dict[str, Path]:
    """Tag-free corpus: every training target equals its input."""
    root = tmp_path_factory.mktemp("identity-data")
    rng = random.Random(9)
    blocks = []
    for _ in range(6):
        tokens = [rng.choice(WORDS) for _ in range(rng.randint(6, 9))] + ["."]
        blocks.append("\n".join(f"{t}\tO" for t in tokens))
    table = root / "source.tsv"
    table.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
    corpus = root / "corpus.jsonl"
    run_acdkit("convert", table, "--format", "token-table", "--output", corpus)
    pairs = root / "pairs.jsonl"
    run_acdkit("export-train", corpus, "--output", pairs)
    for line in pairs.read_text().splitlines():
        record = json.loads(line)
        assert record["target"] == record["input"]  # identity pairs
    return {"corpus": corpus, "pairs": pairs}
