"""Train one classifier per seed and export predictions.

The runner is deliberately a format exporter: it never computes scores or
statistics.  Each seed gets an isolated model (fresh weights, seeded RNG);
a seed whose training raises is recorded, skipped, and summarized at the
end rather than aborting the population.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch

from .data import Example, LABELS, PAD_ID, build_vocab, encode, load_corpus
from .spec import RunSpec, RunnerError, ValidationError

log = logging.getLogger("model_runner")

LABEL_TO_ID = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class RunSummary:
    output_path: Path
    trained_seeds: tuple[int, ...]
    failed_seeds: tuple[tuple[int, str], ...]
    example_count: int


class _TinyBackend:
    """Small randomly initialized transformer with a corpus-built vocabulary.

    Needs no downloads, so toy corpora train in seconds on CPU.
    """

    def __init__(self, spec: RunSpec, train_texts: Sequence[str]):
        self.spec = spec
        self.vocab = build_vocab(train_texts)
        self.pad_id = PAD_ID

    def encode(self, texts: Sequence[str]) -> torch.Tensor:
        return torch.tensor(
            [encode(t, self.vocab, self.spec.max_length) for t in texts],
            dtype=torch.long,
        )

    def fresh_model(self, seed: int):
        from transformers import BertConfig, BertForSequenceClassification

        torch.manual_seed(seed)
        config = BertConfig(
            vocab_size=len(self.vocab),
            hidden_size=32,
            num_hidden_layers=2,
            num_attention_heads=2,
            intermediate_size=64,
            max_position_embeddings=max(self.spec.max_length, 8),
            num_labels=len(LABELS),
            pad_token_id=PAD_ID,
        )
        return BertForSequenceClassification(config)


class _PretrainedBackend:
    """Fine-tunes a named pretrained checkpoint (tokenizer included)."""

    def __init__(self, spec: RunSpec):
        from transformers import AutoTokenizer

        self.spec = spec
        self.tokenizer = AutoTokenizer.from_pretrained(spec.base_model)
        self.pad_id = self.tokenizer.pad_token_id

    def encode(self, texts: Sequence[str]) -> torch.Tensor:
        return self.tokenizer(
            list(texts),
            truncation=True,
            padding="max_length",
            max_length=self.spec.max_length,
            return_tensors="pt",
        )["input_ids"]

    def fresh_model(self, seed: int):
        from transformers import AutoModelForSequenceClassification

        torch.manual_seed(seed)  # seeds the classifier-head initialization
        return AutoModelForSequenceClassification.from_pretrained(
            self.spec.base_model, num_labels=len(LABELS)
        )


def _batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def _train_one(backend, seed: int, ids: torch.Tensor, labels: torch.Tensor):
    spec = backend.spec
    device = torch.device(spec.device)
    model = backend.fresh_model(seed)
    model.to(device)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=spec.learning_rate)
    generator = torch.Generator().manual_seed(seed)
    mask = (ids != backend.pad_id).long()
    for _ in range(spec.epochs):
        for batch in _batches(len(ids), spec.batch_size, generator):
            optimizer.zero_grad()
            out = model(
                input_ids=ids[batch].to(device),
                attention_mask=mask[batch].to(device),
                labels=labels[batch].to(device),
            )
            out.loss.backward()
            optimizer.step()
    return model


@torch.no_grad()
def _predict(backend, model, ids: torch.Tensor) -> list[str]:
    spec = backend.spec
    device = torch.device(spec.device)
    model.eval()
    labels: list[str] = []
    mask = (ids != backend.pad_id).long()
    for start in range(0, len(ids), spec.batch_size):
        logits = model(
            input_ids=ids[start : start + spec.batch_size].to(device),
            attention_mask=mask[start : start + spec.batch_size].to(device),
        ).logits
        labels.extend(LABELS[i] for i in logits.argmax(dim=-1).tolist())
    return labels


def run_population(spec: RunSpec) -> RunSummary:
    """Train one model per seed on the source domain; write all predictions.

    Predictions cover every source example (all splits) plus every example
    of each listed target domain, as ``{"model_id", "example_id", "label"}``
    JSON lines with ``model_id = f"seed{seed}"``.
    """
    examples = load_corpus(spec.corpus_path)
    domains = {e.domain for e in examples}
    if spec.source_domain not in domains:
        raise ValidationError(
            f"source domain {spec.source_domain!r} not present in corpus"
        )
    missing = [d for d in spec.target_domains if d not in domains]
    if missing:
        raise ValidationError(f"target domain(s) not in corpus: {missing}")
    if not spec.target_domains:
        warnings.warn(
            "no target domains listed; predictions cover source splits only"
        )

    source = [e for e in examples if e.domain == spec.source_domain]
    if any(e.split is not None for e in source):
        train_set = [e for e in source if e.split == "train"]
    else:
        train_set = source
    if not train_set:
        raise ValidationError("source domain has no training examples")

    predict_set = source + [
        e for e in examples if e.domain in set(spec.target_domains)
    ]

    if spec.base_model == "tiny-random":
        backend = _TinyBackend(spec, [e.text for e in train_set])
    else:
        backend = _PretrainedBackend(spec)
    train_ids = backend.encode([e.text for e in train_set])
    train_labels = torch.tensor(
        [LABEL_TO_ID[e.label] for e in train_set], dtype=torch.long
    )
    predict_ids = backend.encode([e.text for e in predict_set])

    trained: list[int] = []
    failed: list[tuple[int, str]] = []
    lines: list[str] = []
    for seed in spec.seeds:
        try:
            model = _train_one(backend, seed, train_ids, train_labels)
            predicted = _predict(backend, model, predict_ids)
        except Exception as exc:  # noqa: BLE001 - per-seed isolation
            log.warning("seed %d failed: %s", seed, exc)
            failed.append((seed, str(exc)))
            continue
        model_id = f"seed{seed}"
        for example, label in zip(predict_set, predicted):
            lines.append(
                json.dumps(
                    {
                        "model_id": model_id,
                        "example_id": example.id,
                        "label": label,
                    },
                    sort_keys=True,
                )
            )
        trained.append(seed)
        log.info("seed %d trained and exported", seed)

    if not trained:
        raise RunnerError(
            "every seed failed: " + "; ".join(f"{s}: {m}" for s, m in failed)
        )

    output_path = Path(spec.output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=output_path.parent, prefix=output_path.name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, output_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

    log.info(
        "population done: %d trained, %d failed, %d examples each",
        len(trained),
        len(failed),
        len(predict_set),
    )
    return RunSummary(
        output_path=output_path,
        trained_seeds=tuple(trained),
        failed_seeds=tuple(failed),
        example_count=len(predict_set),
    )
