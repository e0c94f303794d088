"""Corpus-format reader and the tiny whitespace tokenizer.

The corpus wire format is JSON Lines with ``id``, ``text``, ``domain``
and either ``label`` ("positive"/"negative") or ``rating`` (1..5; above 3
positive, below 3 negative, exactly 3 dropped), plus an optional
``split``.  Parsing is self-contained: the runner only shares file
formats with the evaluation harness, never code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .spec import InputError

LABELS = ("negative", "positive")

PAD_ID = 0
UNK_ID = 1


@dataclass(frozen=True)
class Example:
    id: str
    text: str
    label: str
    domain: str
    split: Optional[str] = None


def load_corpus(path: Union[str, Path]) -> list[Example]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus file not found: {path}")
    out: list[Example] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"record #{index}: malformed JSON: {exc}") from exc
            for key in ("id", "text", "domain"):
                if key not in record:
                    raise InputError(f"record #{index}: missing field {key!r}")
            if "label" in record:
                label = record["label"]
                if label not in LABELS:
                    raise InputError(f"record #{index}: unknown label {label!r}")
            elif "rating" in record:
                rating = record["rating"]
                if (
                    not isinstance(rating, int)
                    or isinstance(rating, bool)
                    or not 1 <= rating <= 5
                ):
                    raise InputError(f"record #{index}: bad rating {rating!r}")
                if rating == 3:
                    continue
                label = "positive" if rating > 3 else "negative"
            else:
                raise InputError(f"record #{index}: needs 'label' or 'rating'")
            example_id = str(record["id"])
            if example_id in seen:
                raise InputError(f"record #{index}: duplicate id {example_id!r}")
            seen.add(example_id)
            out.append(
                Example(
                    id=example_id,
                    text=str(record["text"]),
                    label=label,
                    domain=str(record["domain"]),
                    split=record.get("split"),
                )
            )
    if not out:
        raise InputError(f"corpus file {path} contains no usable examples")
    return out


def build_vocab(texts: Sequence[str], max_size: int = 20000) -> dict[str, int]:
    """Token -> id map from whitespace-split lowercase text.

    Ids 0 and 1 are reserved for padding and unknown tokens; remaining
    slots go to the most frequent tokens, ties broken lexicographically.
    """
    counts: dict[str, int] = {}
    for text in texts:
        for tok in text.lower().split():
            counts[tok] = counts.get(tok, 0) + 1
    ranked = sorted(counts, key=lambda t: (-counts[t], t))[: max_size - 2]
    vocab = {"[PAD]": PAD_ID, "[UNK]": UNK_ID}
    for tok in ranked:
        vocab[tok] = len(vocab)
    return vocab


def encode(text: str, vocab: dict[str, int], max_length: int) -> list[int]:
    ids = [vocab.get(tok, UNK_ID) for tok in text.lower().split()][:max_length]
    return ids + [PAD_ID] * (max_length - len(ids))
