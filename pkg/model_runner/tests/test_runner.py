import json

import pytest

from capeval.corpus import load_corpus as harness_load_corpus
from capeval.evaluation import load_predictions

from model_runner import RunSpec, ValidationError, run_population


def _toy_corpus(path, with_targets=True):
    rows = []
    texts = [
        ("not great at all", "negative"),
        ("really wonderful item", "positive"),
        ("would have been better", "negative"),
        ("works fine and looks nice", "positive"),
        ("nothing about it works", "negative"),
        ("super sturdy and easy", "positive"),
        ("worse than expected", "negative"),
        ("very happy overall", "positive"),
    ]
    for i, (text, label) in enumerate(texts):
        split = "train" if i % 2 == 0 else "validation"
        rows.append(
            {"id": f"s{i}", "text": text, "label": label, "domain": "home",
             "split": split}
        )
    if with_targets:
        for i, (text, label) in enumerate(texts[:4]):
            rows.append(
                {"id": f"t{i}", "text": text, "label": label, "domain": "office"}
            )
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    return path


def _toy_spec(tmp_path, **overrides):
    corpus = _toy_corpus(tmp_path / "corpus.jsonl")
    kwargs = dict(
        corpus_path=corpus,
        output_path=tmp_path / "preds.jsonl",
        source_domain="home",
        target_domains=("office",),
        seeds=(0, 1),
        epochs=1,
        batch_size=4,
        max_length=8,
    )
    kwargs.update(overrides)
    return RunSpec(**kwargs)


class TestRunSpec:
    def test_duplicate_seeds_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="duplicate"):
            _toy_spec(tmp_path, seeds=(3, 3))

    def test_empty_seed_list_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="non-empty"):
            _toy_spec(tmp_path, seeds=())

    def test_source_cannot_be_target(self, tmp_path):
        with pytest.raises(ValidationError, match="target"):
            _toy_spec(tmp_path, target_domains=("home",))


class TestRunPopulation:
    def test_two_seed_toy_run_round_trips(self, tmp_path):
        spec = _toy_spec(tmp_path)
        summary = run_population(spec)
        assert summary.trained_seeds == (0, 1)
        assert summary.failed_seeds == ()
        loaded = load_predictions(spec.output_path)
        assert sorted(ps.model_id for ps in loaded) == ["seed0", "seed1"]
        expected_ids = {f"s{i}" for i in range(8)} | {f"t{i}" for i in range(4)}
        for ps in loaded:
            assert set(ps.predictions) == expected_ids
            assert set(ps.predictions.values()) <= {"positive", "negative"}
        ok = len(loaded) == 2
        print(f"[acceptance] adapter contract: {'PASS' if ok else 'FAIL'} "
              f"(2-seed toy run loads with zero errors)")
        assert ok

    def test_predictions_consumable_by_harness_corpus(self, tmp_path):
        # The full handoff: harness corpus loader + adapter output agree on ids.
        spec = _toy_spec(tmp_path)
        run_population(spec)
        corpus = harness_load_corpus(
            spec.corpus_path, source_domain="home", target_domains=("office",)
        )
        preds = load_predictions(spec.output_path)
        for ps in preds:
            assert set(ps.predictions) == {e.id for e in corpus.examples}
        assert corpus.load_report.dropped_neutral == 0

    def test_no_targets_warns_and_covers_source_only(self, tmp_path):
        spec = _toy_spec(tmp_path, target_domains=())
        with pytest.warns(UserWarning, match="source splits only"):
            summary = run_population(spec)
        assert summary.example_count == 8
        for ps in load_predictions(spec.output_path):
            assert set(ps.predictions) == {f"s{i}" for i in range(8)}

    def test_unknown_source_domain(self, tmp_path):
        spec = _toy_spec(tmp_path)
        bad = RunSpec(
            corpus_path=spec.corpus_path,
            output_path=spec.output_path,
            source_domain="nowhere",
            seeds=(0,),
        )
        with pytest.raises(ValidationError, match="nowhere"):
            run_population(bad)

    def test_seed_reproducibility(self, tmp_path):
        spec = _toy_spec(tmp_path, seeds=(7,))
        run_population(spec)
        first = (tmp_path / "preds.jsonl").read_text()
        run_population(spec)
        assert (tmp_path / "preds.jsonl").read_text() == first
