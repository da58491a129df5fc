"""Run configuration: YAML file, schema-validated, hashed into reports.

Unknown keys are rejected so a typo'd setting can never silently fall
back to a default. The config hash covers every field and is embedded in
machine reports, which makes runs auditable and reports reproducible.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from acdkit.errors import ConfigError


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CorpusInput(_StrictModel):
    path: str
    format: Literal["canonical", "standoff", "token-table"] = "canonical"
    source_corpus: str = "Synthetic"


class BackendConfig(_StrictModel):
    kind: Literal["http", "echo", "gold-replay", "perturb", "replay"] = "echo"
    endpoint_url: str = ""
    backend_id: str = ""
    api_key_env: str = "ACD_API_KEY"  # credential comes from the environment
    parallelism: int = Field(default=1, ge=1)
    retries: int = Field(default=2, ge=0)
    timeout_s: float = Field(default=120.0, gt=0)
    perturb_seed: int = 0
    replay_path: str = ""


class DecodingConfig(_StrictModel):
    temperature: float = Field(default=0.01, ge=0)
    top_p: float = Field(default=0.1, gt=0, le=1)
    max_output_tokens: int = Field(default=2048, ge=1)


class EvaluationConfig(_StrictModel):
    macro_includes_o: bool = True
    jaccard_threshold: float = Field(default=0.8, gt=0, le=1)
    parse_mode: Literal["lenient", "strict"] = "lenient"
    allow_partial: bool = False


class RunConfig(_StrictModel):
    corpus: list[CorpusInput] = Field(default_factory=list)
    template_version: str = "v1"
    chunk_budget: int = Field(default=1024, ge=1)
    safety_factor: float = Field(default=0.6, gt=0, le=1)
    backend: BackendConfig = Field(default_factory=BackendConfig)
    decoding: DecodingConfig = Field(default_factory=DecodingConfig)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    split_seed: int = 13
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    output_dir: str = "out"


def config_hash(config: RunConfig) -> str:
    payload = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return parse_config(raw, source=str(path))


def parse_config(raw: dict, source: str = "<dict>") -> RunConfig:
    try:
        return RunConfig(**raw)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {exc}") from None
