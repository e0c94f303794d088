"""Seeded transformer fine-tuning populations exporting harness predictions."""

from .data import Example, load_corpus
from .runner import RunSummary, run_population
from .spec import InputError, RunSpec, RunnerError, ValidationError

__all__ = [
    "Example",
    "InputError",
    "RunSpec",
    "RunSummary",
    "RunnerError",
    "ValidationError",
    "load_corpus",
    "run_population",
]
