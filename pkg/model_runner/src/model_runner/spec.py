"""Run specification and error types for the population runner."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union


class RunnerError(Exception):
    """Base class for runner failures."""


class ValidationError(RunnerError):
    """The run specification or corpus violates an invariant."""


class InputError(RunnerError):
    """A required input file is missing or malformed."""


DEFAULT_SEEDS = tuple(range(100))


@dataclass(frozen=True)
class RunSpec:
    """Everything one population run needs.

    ``base_model`` is either a Hugging Face model name to fine-tune or the
    special value ``"tiny-random"``, which builds a small randomly
    initialized transformer with a corpus-derived vocabulary (no downloads,
    suitable for smoke tests and toy corpora).
    """

    corpus_path: Union[str, Path]
    output_path: Union[str, Path]
    source_domain: str
    target_domains: tuple[str, ...] = ()
    base_model: str = "tiny-random"
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    epochs: int = 2
    batch_size: int = 16
    learning_rate: float = 5e-4
    max_length: int = 64
    device: str = "cpu"

    def __post_init__(self):
        if not self.seeds:
            raise ValidationError("seed list must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValidationError("seed list contains duplicates")
        if self.epochs < 1:
            raise ValidationError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be at least 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.max_length < 2:
            raise ValidationError("max_length must be at least 2")
        if not self.source_domain:
            raise ValidationError("source_domain must be set")
        if self.source_domain in self.target_domains:
            raise ValidationError("source_domain also listed as a target")
