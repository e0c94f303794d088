"""Scoring black-box prediction files against domains and slices.

Predictions arrive as JSON Lines records with `model_id`, `example_id`,
`label`.  The score matrix assembled here (source accuracy + per-capability
slice accuracies per model, plus per-target-domain accuracy vectors) is the
input to the statistics engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .corpus import Corpus, Example, LABELS
from .errors import InputError, ValidationError
from .slicer import Slice


@dataclass(frozen=True)
class PredictionSet:
    """One model's predicted label per example id."""

    model_id: str
    predictions: Mapping[str, str]


@dataclass(frozen=True)
class ScoreMatrix:
    """Models x features accuracy table plus per-target accuracy vectors.

    Feature order: source accuracy first, then one column per slice in
    catalog order.  Row order follows model_ids everywhere.
    """

    model_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    features: np.ndarray  # shape (M, P)
    targets: dict[str, np.ndarray]  # domain -> shape (M,)

    def __post_init__(self):
        if self.features.shape != (len(self.model_ids), len(self.feature_names)):
            raise ValidationError("score matrix shape mismatch")
        if np.any(self.features < 0) or np.any(self.features > 1):
            raise ValidationError("score matrix entries must lie in [0, 1]")
        for dom, vec in self.targets.items():
            if vec.shape != (len(self.model_ids),):
                raise ValidationError(f"target vector for {dom!r} has wrong length")

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]


def load_predictions(path: Union[str, Path]) -> list[PredictionSet]:
    """Load a predictions file; one PredictionSet per model id encountered."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"predictions file not found: {path}")
    per_model: dict[str, dict[str, str]] = {}
    with path.open(encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"record #{index}: malformed JSON: {exc}") from exc
            try:
                model_id = str(record["model_id"])
                example_id = str(record["example_id"])
                label = record["label"]
            except KeyError as exc:
                raise InputError(f"record #{index}: missing field {exc}") from exc
            if label not in LABELS:
                raise InputError(f"record #{index}: unknown label {label!r}")
            bucket = per_model.setdefault(model_id, {})
            if example_id in bucket:
                raise InputError(
                    f"record #{index}: duplicate prediction for "
                    f"({model_id!r}, {example_id!r})"
                )
            bucket[example_id] = label
    return [PredictionSet(mid, preds) for mid, preds in per_model.items()]


def write_predictions(
    preds: Iterable[PredictionSet], path: Union[str, Path]
) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ps in preds:
            for example_id in ps.predictions:
                fh.write(
                    json.dumps(
                        {
                            "model_id": ps.model_id,
                            "example_id": example_id,
                            "label": ps.predictions[example_id],
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def accuracy(preds: PredictionSet, examples: Sequence[Example]) -> float:
    """Fraction of examples whose prediction equals the label."""
    if not examples:
        raise ValidationError("accuracy undefined over an empty example set")
    correct = 0
    for e in examples:
        try:
            predicted = preds.predictions[e.id]
        except KeyError:
            raise ValidationError(
                f"model {preds.model_id!r} has no prediction for example {e.id!r}"
            ) from None
        correct += predicted == e.label
    return correct / len(examples)


def failure_rate(preds: PredictionSet, examples: Sequence[Example]) -> float:
    return 1.0 - accuracy(preds, examples)


def correctness_matrix(
    preds: Sequence[PredictionSet], examples: Sequence[Example]
) -> np.ndarray:
    """0/1 matrix of shape (models, examples): prediction equals label."""
    out = np.empty((len(preds), len(examples)), dtype=np.float64)
    for i, ps in enumerate(preds):
        for j, e in enumerate(examples):
            try:
                out[i, j] = ps.predictions[e.id] == e.label
            except KeyError:
                raise ValidationError(
                    f"model {ps.model_id!r} has no prediction for example {e.id!r}"
                ) from None
    return out


def build_score_matrix(
    preds: Sequence[PredictionSet],
    corpus: Corpus,
    slices: Sequence[Slice],
) -> ScoreMatrix:
    """Assemble source/slice accuracies and target-domain accuracy vectors.

    Slice accuracies are computed on slice members within the source
    evaluation split.  A slice with zero members is rejected: its accuracy
    column would be undefined.
    """
    eval_split = corpus.source_eval_split()
    if not eval_split:
        raise ValidationError("source evaluation split is empty")
    empty = [s.capability_name for s in slices if not s.member_ids]
    if empty:
        raise ValidationError(
            "slice(s) with zero members cannot become score columns: "
            + ", ".join(empty)
        )
    model_ids = tuple(ps.model_id for ps in preds)
    eval_ids = {e.id for e in eval_split}
    for s in slices:
        stray = s.member_ids - eval_ids
        if stray:
            raise ValidationError(
                f"slice {s.capability_name!r} references ids outside the "
                f"source evaluation split (e.g. {sorted(stray)[0]!r})"
            )

    correct = correctness_matrix(preds, eval_split)
    columns = [correct.mean(axis=1)]
    names = ["source_accuracy"]
    for s in slices:
        mask = np.array([e.id in s.member_ids for e in eval_split])
        columns.append(correct[:, mask].mean(axis=1))
        names.append(s.capability_name)

    targets = {}
    for dom in corpus.target_domains:
        dom_examples = corpus.domain(dom)
        targets[dom] = correctness_matrix(preds, dom_examples).mean(axis=1)

    return ScoreMatrix(
        model_ids=model_ids,
        feature_names=tuple(names),
        features=np.column_stack(columns),
        targets=targets,
    )


def subset_accuracies(
    preds: Sequence[PredictionSet],
    examples: Sequence[Example],
    subsets: Sequence[Sequence[str]],
) -> np.ndarray:
    """Accuracy of every model on each id-subset of the given examples.

    Returns shape (models, len(subsets)).  Used for the random-subset
    baseline columns.
    """
    correct = correctness_matrix(preds, examples)
    index = {e.id: j for j, e in enumerate(examples)}
    cols = []
    for subset in subsets:
        if not subset:
            raise ValidationError("empty subset has no defined accuracy")
        idx = [index[i] for i in subset]
        cols.append(correct[:, idx].mean(axis=1))
    return np.column_stack(cols)
