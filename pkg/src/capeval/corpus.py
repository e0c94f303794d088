"""Labeled multi-domain text corpora: loading, binarization, balancing.

Wire format is JSON Lines, one record per line:

    {"id": "...", "text": "...", "domain": "...",
     "label": "positive" | "negative",    # or instead:
     "rating": 1..5,                      # binarized at load; 3 is dropped
     "split": "train" | "validation"}     # optional

Records whose rating binarizes to "dropped" are excluded and counted in the
load report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import InputError, ValidationError

POSITIVE = "positive"
NEGATIVE = "negative"
LABELS = (POSITIVE, NEGATIVE)


@dataclass(frozen=True)
class Example:
    """One labeled text item belonging to a named domain."""

    id: str
    text: str
    label: str
    domain: str
    split: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise ValidationError(f"example {self.id!r}: text must be non-empty")
        if self.label not in LABELS:
            raise ValidationError(
                f"example {self.id!r}: label must be one of {LABELS}, got {self.label!r}"
            )


@dataclass(frozen=True)
class LoadReport:
    """Bookkeeping from a corpus load."""

    total_records: int
    loaded: int
    dropped_neutral: int


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of examples with a designated source domain."""

    examples: tuple[Example, ...]
    source_domain: str
    target_domains: tuple[str, ...]
    load_report: Optional[LoadReport] = None

    def __post_init__(self):
        if self.source_domain in self.target_domains:
            raise ValidationError(
                f"source domain {self.source_domain!r} listed among target domains"
            )
        present = {e.domain for e in self.examples}
        for dom in (self.source_domain, *self.target_domains):
            if dom not in present:
                raise ValidationError(f"domain {dom!r} has no examples in the corpus")
        ids = [e.id for e in self.examples]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate example ids: {', '.join(dupes[:5])}")

    def domain(self, name: str) -> list[Example]:
        return [e for e in self.examples if e.domain == name]

    def source_examples(self) -> list[Example]:
        return self.domain(self.source_domain)

    def source_eval_split(self) -> list[Example]:
        """Source-domain examples used for slicing and scoring.

        If any source example declares a split, the validation split is used;
        otherwise all source examples are.
        """
        src = self.source_examples()
        if any(e.split is not None for e in src):
            return [e for e in src if e.split == "validation"]
        return src

    def by_id(self) -> dict[str, Example]:
        return {e.id: e for e in self.examples}


def binarize_rating(rating: int) -> Optional[str]:
    """Map a 1..5 star rating to a binary label; rating 3 maps to None (drop)."""
    if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
        raise ValidationError(f"rating must be an integer in 1..5, got {rating!r}")
    if rating > 3:
        return POSITIVE
    if rating < 3:
        return NEGATIVE
    return None


def _example_from_record(record: dict, index: int) -> Optional[Example]:
    for key in ("id", "text", "domain"):
        if key not in record:
            raise InputError(f"record #{index}: missing field {key!r}")
    if "label" in record:
        label = record["label"]
        if label not in LABELS:
            raise InputError(
                f"record #{index}: unknown label {label!r} (expected positive/negative)"
            )
    elif "rating" in record:
        label = binarize_rating(record["rating"])
        if label is None:
            return None
    else:
        raise InputError(f"record #{index}: needs either 'label' or 'rating'")
    return Example(
        id=str(record["id"]),
        text=str(record["text"]),
        label=label,
        domain=str(record["domain"]),
        split=record.get("split"),
    )


def read_examples(path: Union[str, Path]) -> tuple[list[Example], LoadReport]:
    """Read a corpus file without domain bookkeeping."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus file not found: {path}")
    examples: list[Example] = []
    dropped = 0
    total = 0
    with path.open(encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"record #{index}: malformed JSON: {exc}") from exc
            try:
                example = _example_from_record(record, index)
            except ValidationError as exc:
                raise InputError(f"record #{index}: {exc}") from exc
            if example is None:
                dropped += 1
            else:
                examples.append(example)
    return examples, LoadReport(total, len(examples), dropped)


def load_corpus(
    path: Union[str, Path],
    source_domain: str,
    target_domains: Sequence[str],
) -> Corpus:
    """Load a corpus file and validate the declared domain structure."""
    examples, report = read_examples(path)
    return Corpus(
        examples=tuple(examples),
        source_domain=source_domain,
        target_domains=tuple(target_domains),
        load_report=report,
    )


def write_examples(examples: Iterable[Example], path: Union[str, Path]) -> None:
    """Write examples in the corpus wire format."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for e in examples:
            record = {"id": e.id, "text": e.text, "label": e.label, "domain": e.domain}
            if e.split is not None:
                record["split"] = e.split
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def balanced_sample(examples: Sequence[Example], seed: int) -> list[Example]:
    """Downsample the majority class so both classes have equal counts.

    The minority class is kept whole; the majority class is sampled uniformly
    without replacement with the given seed.  Output preserves input order.
    Deterministic given (examples, seed).
    """
    positives = [e for e in examples if e.label == POSITIVE]
    negatives = [e for e in examples if e.label == NEGATIVE]
    if not positives or not negatives:
        missing = NEGATIVE if not negatives else POSITIVE
        raise ValidationError(f"cannot balance: no {missing} examples present")
    k = min(len(positives), len(negatives))
    rng = np.random.default_rng(seed)

    def pick(group: list[Example]) -> set[str]:
        if len(group) == k:
            return {e.id for e in group}
        chosen = rng.choice(len(group), size=k, replace=False)
        return {group[i].id for i in chosen}

    keep = pick(positives) | pick(negatives)
    return [e for e in examples if e.id in keep]
