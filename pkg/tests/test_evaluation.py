import json
from fractions import Fraction

import numpy as np
import pytest

from capeval.errors import InputError, ValidationError
from capeval.evaluation import (
    PredictionSet,
    accuracy,
    build_score_matrix,
    failure_rate,
    load_predictions,
    subset_accuracies,
    write_predictions,
)
from capeval.slicer import Slice

from conftest import make_example


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")


class TestLoadPredictions:
    def test_two_models(self, tmp_path):
        path = tmp_path / "p.jsonl"
        records = [
            {"model_id": m, "example_id": e, "label": "positive"}
            for m in ("m1", "m2")
            for e in ("e1", "e2", "e3")
        ]
        write_jsonl(path, records)
        preds = load_predictions(path)
        assert len(preds) == 2
        assert all(len(p.predictions) == 3 for p in preds)

    def test_unknown_label(self, tmp_path):
        path = tmp_path / "p.jsonl"
        write_jsonl(path, [{"model_id": "m", "example_id": "e", "label": "neutral"}])
        with pytest.raises(InputError, match="neutral"):
            load_predictions(path)

    def test_duplicate_pair(self, tmp_path):
        path = tmp_path / "p.jsonl"
        write_jsonl(
            path,
            [
                {"model_id": "m", "example_id": "e", "label": "positive"},
                {"model_id": "m", "example_id": "e", "label": "negative"},
            ],
        )
        with pytest.raises(InputError, match="duplicate"):
            load_predictions(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text("")
        assert load_predictions(path) == []

    def test_round_trip(self, tmp_path):
        preds = [
            PredictionSet("m1", {"e1": "positive", "e2": "negative"}),
            PredictionSet("m2", {"e1": "negative"}),
        ]
        path = tmp_path / "p.jsonl"
        write_predictions(preds, path)
        assert load_predictions(path) == preds


class TestAccuracy:
    def _examples(self):
        return [
            make_example("e1", "a", "positive"),
            make_example("e2", "b", "negative"),
            make_example("e3", "c", "positive"),
            make_example("e4", "d", "negative"),
        ]

    def test_all_correct(self):
        preds = PredictionSet(
            "m", {"e1": "positive", "e2": "negative", "e3": "positive", "e4": "negative"}
        )
        assert accuracy(preds, self._examples()) == 1.0

    def test_three_of_four(self):
        preds = PredictionSet(
            "m", {"e1": "positive", "e2": "negative", "e3": "positive", "e4": "positive"}
        )
        assert accuracy(preds, self._examples()) == 0.75

    def test_empty_subset_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            accuracy(PredictionSet("m", {}), [])

    def test_missing_prediction_names_id(self):
        preds = PredictionSet("m", {"e1": "positive"})
        with pytest.raises(ValidationError, match="e2"):
            accuracy(preds, self._examples()[:2])

    def test_failure_rate_complement(self):
        preds = PredictionSet(
            "m", {"e1": "positive", "e2": "positive", "e3": "negative", "e4": "negative"}
        )
        examples = self._examples()
        assert accuracy(preds, examples) + failure_rate(preds, examples) == 1.0

    def test_order_invariant(self):
        preds = PredictionSet(
            "m", {"e1": "positive", "e2": "negative", "e3": "negative", "e4": "negative"}
        )
        examples = self._examples()
        assert accuracy(preds, examples) == accuracy(preds, examples[::-1])

    def test_union_is_weighted_mean(self):
        # Exact rational arithmetic check on disjoint subsets.
        s1 = [make_example(f"a{i}", "x", "positive") for i in range(3)]
        s2 = [make_example(f"b{i}", "x", "negative") for i in range(5)]
        preds = PredictionSet(
            "m",
            {
                "a0": "positive", "a1": "negative", "a2": "positive",
                "b0": "negative", "b1": "positive", "b2": "negative",
                "b3": "positive", "b4": "negative",
            },
        )
        acc1 = Fraction(accuracy(preds, s1)).limit_denominator(10**6)
        acc2 = Fraction(accuracy(preds, s2)).limit_denominator(10**6)
        acc_union = Fraction(accuracy(preds, s1 + s2)).limit_denominator(10**6)
        assert acc_union == (len(s1) * acc1 + len(s2) * acc2) / (len(s1) + len(s2))


class TestBuildScoreMatrix:
    def _preds(self, corpus, mapping):
        out = []
        for mid, fn in mapping.items():
            out.append(
                PredictionSet(mid, {e.id: fn(e) for e in corpus.examples})
            )
        return out

    def test_shape(self, toy_corpus):
        preds = self._preds(
            toy_corpus, {"m1": lambda e: e.label, "m2": lambda e: "positive"}
        )
        slices = [
            Slice("negation", frozenset({"s1"}), 0.25),
        ]
        scores = build_score_matrix(preds, toy_corpus, slices)
        assert scores.features.shape == (2, 2)
        assert scores.feature_names == ("source_accuracy", "negation")
        assert set(scores.targets) == {"tgt_a", "tgt_b"}
        assert scores.targets["tgt_a"].shape == (2,)

    def test_all_positive_on_balanced_slice_scores_half(self, toy_corpus):
        preds = self._preds(toy_corpus, {"m": lambda e: "positive"})
        # s1 negative + s3 positive: a balanced two-member slice.
        slices = [Slice("bal", frozenset({"s1", "s3"}), 0.5)]
        scores = build_score_matrix(preds, toy_corpus, slices)
        assert scores.column("bal")[0] == 0.5

    def test_empty_slice_rejected(self, toy_corpus):
        preds = self._preds(toy_corpus, {"m": lambda e: e.label})
        slices = [Slice("ghost", frozenset(), 0.0)]
        with pytest.raises(ValidationError, match="ghost"):
            build_score_matrix(preds, toy_corpus, slices)

    def test_source_accuracy_is_eval_split_accuracy(self, toy_corpus):
        # Correct on validation ids only; wrong on the train example.
        def predict(e):
            return e.label if e.split == "validation" else (
                "negative" if e.label == "positive" else "positive"
            )

        preds = self._preds(toy_corpus, {"m": predict})
        slices = [Slice("negation", frozenset({"s1"}), 0.25)]
        scores = build_score_matrix(preds, toy_corpus, slices)
        assert scores.column("source_accuracy")[0] == 1.0

    def test_slice_outside_eval_split_rejected(self, toy_corpus):
        preds = self._preds(toy_corpus, {"m": lambda e: e.label})
        slices = [Slice("bad", frozenset({"s5"}), 0.2)]  # s5 is a train example
        with pytest.raises(ValidationError, match="bad"):
            build_score_matrix(preds, toy_corpus, slices)


def test_subset_accuracies(toy_corpus):
    preds = [PredictionSet("m", {e.id: e.label for e in toy_corpus.examples})]
    eval_split = toy_corpus.source_eval_split()
    out = subset_accuracies(preds, eval_split, [["s1", "s2"], ["s3"]])
    assert out.shape == (1, 2)
    assert np.all(out == 1.0)


def test_subset_accuracies_empty_subset_rejected(toy_corpus):
    preds = [PredictionSet("m", {e.id: e.label for e in toy_corpus.examples})]
    with pytest.raises(ValidationError):
        subset_accuracies(preds, toy_corpus.source_eval_split(), [[]])
