"""Tuning configuration.

Generative learning rate and batch size have no published defaults, so
they are required; the encoder defaults (lr 1e-4, max input length 64)
are the published ones. Checkpoint selection is always validation macro
F1 as computed by the pipeline evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass


class AdapterConfigError(ValueError):
    pass


BASE_MODELS = ("tiny-gpt2", "tiny-encoder")


@dataclass
class TuneConfig:
    base_model_id: str = "tiny-gpt2"
    epochs: int = 10
    learning_rate: float | None = None  # required for the generative path
    batch_size: int | None = None  # required for the generative path
    max_input_length: int = 64  # encoder window size
    max_new_tokens: int = 256
    eval_every: int = 1  # checkpoint-selection cadence, in epochs
    seed: int = 0
    acdkit_bin: str = "acdkit"  # the evaluator this adapter defers to

    def __post_init__(self) -> None:
        if self.base_model_id not in BASE_MODELS:
            raise AdapterConfigError(
                f"unknown base model {self.base_model_id!r}; built-in "
                f"from-scratch presets: {BASE_MODELS} (model hubs are not "
                "assumed reachable)"
            )
        if self.epochs < 1:
            raise AdapterConfigError("epochs must be >= 1")
        if self.max_input_length < 2:
            raise AdapterConfigError("max_input_length must be >= 2")
        if self.eval_every < 1:
            raise AdapterConfigError("eval_every must be >= 1")

    def require_generative_hyperparams(self) -> None:
        if self.learning_rate is None or self.batch_size is None:
            raise AdapterConfigError(
                "generative tuning requires explicit learning_rate and "
                "batch_size; there are no published defaults for them"
            )

    def encoder_learning_rate(self) -> float:
        return 1e-4 if self.learning_rate is None else self.learning_rate
