import numpy as np
import pytest

from capeval.distance import (
    DomainDistance,
    build_vocabulary,
    compute_distance,
    domain_classifier_error,
    featurize,
    improvement_vs_distance,
    proxy_a_distance,
)
from capeval.errors import NumericalError, ValidationError

from conftest import make_example


class TestFeaturize:
    def test_tie_break_lexicographic(self):
        vocab = build_vocabulary(["a b", "a c"], vocab_size=2)
        # "a" has df 2; "b" and "c" tie at 1 -> "b" wins lexicographically.
        assert vocab == ["a", "b"]

    def test_all_tokens_kept_when_vocab_large(self):
        X, vocab = featurize(
            [make_example("e1", "x y z"), make_example("e2", "x q")], vocab_size=100
        )
        assert set(vocab) == {"x", "y", "z", "q"}
        assert X.shape == (2, 4)

    def test_single_example(self):
        X, vocab = featurize([make_example("e1", "hello hello world")], vocab_size=10)
        assert sorted(vocab) == ["hello", "world"]
        row = X.toarray()[0]
        assert row[vocab.index("hello")] == 2

    def test_empty_input_rejected(self):
        with pytest.raises(ValidationError):
            featurize([])


def _domain(name, texts):
    return [make_example(f"{name}{i}", t, domain=name) for i, t in enumerate(texts)]


class TestDomainClassifierError:
    def test_identical_distributions_near_chance(self):
        rng = np.random.default_rng(0)
        vocab = ["w%d" % i for i in range(20)]
        texts = [
            " ".join(rng.choice(vocab, size=10)) for _ in range(200)
        ]
        src = _domain("s", texts[:100])
        tgt = _domain("t", texts[100:])
        error = domain_classifier_error(src, tgt, split_seed=0)
        assert error > 0.3  # indistinguishable domains stay near chance

    def test_disjoint_vocabularies_separable(self):
        rng = np.random.default_rng(1)
        a = ["alpha%d" % i for i in range(10)]
        b = ["beta%d" % i for i in range(10)]
        src = _domain("s", [" ".join(rng.choice(a, size=8)) for _ in range(60)])
        tgt = _domain("t", [" ".join(rng.choice(b, size=8)) for _ in range(60)])
        error = domain_classifier_error(src, tgt, split_seed=0)
        assert error < 0.05

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        vocab = ["w%d" % i for i in range(15)]
        src = _domain("s", [" ".join(rng.choice(vocab, size=8)) for _ in range(40)])
        tgt = _domain("t", [" ".join(rng.choice(vocab, size=8)) for _ in range(40)])
        assert domain_classifier_error(src, tgt, 5) == domain_classifier_error(
            src, tgt, 5
        )

    def test_symmetric_in_domain_roles(self):
        rng = np.random.default_rng(3)
        a = ["alpha%d" % i for i in range(10)]
        b = ["beta%d" % i for i in range(10)]
        src = _domain("s", [" ".join(rng.choice(a, size=8)) for _ in range(50)])
        tgt = _domain("t", [" ".join(rng.choice(b, size=8)) for _ in range(50)])
        e1 = domain_classifier_error(src, tgt, split_seed=1)
        e2 = domain_classifier_error(tgt, src, split_seed=1)
        assert e1 == pytest.approx(e2, abs=0.05)

    def test_tiny_domain_rejected(self):
        src = _domain("s", ["a b c"])
        tgt = _domain("t", ["d e f"] * 10)
        with pytest.raises(ValidationError, match="at least"):
            domain_classifier_error(src, tgt)


class TestProxyADistance:
    def test_chance_level(self):
        assert proxy_a_distance(0.5) == 0.0

    def test_perfect_separation(self):
        assert proxy_a_distance(0.0) == 2.0

    def test_quarter(self):
        assert proxy_a_distance(0.25) == 1.0

    def test_above_half_clamped_with_warning(self):
        with pytest.warns(UserWarning, match="clamping"):
            assert proxy_a_distance(0.6) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            proxy_a_distance(-0.1)

    def test_strictly_decreasing_in_error(self):
        values = [proxy_a_distance(e) for e in np.linspace(0, 0.5, 20)]
        assert all(a > b for a, b in zip(values, values[1:]))


class _FakeAnalysis:
    def __init__(self, improvements):
        self._imp = improvements

    def improvement(self, domain):
        return self._imp[domain]


def _dd(target, distance):
    return DomainDistance("src", target, (2 - distance) / 4, distance)


class TestImprovementVsDistance:
    def test_two_domains_exact_interpolation(self):
        analysis = _FakeAnalysis({"a": 0.1, "b": 0.3})
        line = improvement_vs_distance([_dd("a", 0.5), _dd("b", 1.5)], analysis)
        assert line.slope == pytest.approx(0.2, abs=1e-12)
        assert line.intercept == pytest.approx(0.0, abs=1e-12)

    def test_positive_slope_recovered(self):
        rng = np.random.default_rng(0)
        domains = {f"d{i}": 0.2 * i for i in range(8)}
        improvements = {k: 0.05 * v + rng.normal(0, 0.001) for k, v in domains.items()}
        analysis = _FakeAnalysis(improvements)
        dds = [_dd(k, v) for k, v in domains.items()]
        line = improvement_vs_distance(dds, analysis)
        assert line.slope > 0
        assert len(line.points) == 8

    def test_single_domain_rejected(self):
        with pytest.raises(ValidationError):
            improvement_vs_distance([_dd("a", 1.0)], _FakeAnalysis({"a": 0.1}))

    def test_equidistant_domains_degenerate(self):
        analysis = _FakeAnalysis({"a": 0.1, "b": 0.2, "c": 0.3})
        dds = [_dd(k, 1.0) for k in ("a", "b", "c")]
        with pytest.raises(NumericalError):
            improvement_vs_distance(dds, analysis)


def test_compute_distance_invariant():
    rng = np.random.default_rng(4)
    a = ["alpha%d" % i for i in range(10)]
    b = ["beta%d" % i for i in range(10)]
    src = _domain("s", [" ".join(rng.choice(a, size=8)) for _ in range(50)])
    tgt = _domain("t", [" ".join(rng.choice(b, size=8)) for _ in range(50)])
    dd = compute_distance(src, tgt, "s", "t", split_seed=0)
    assert dd.proxy_a_distance == pytest.approx(
        2 * (1 - 2 * dd.classifier_error), abs=1e-12
    )
    assert 0.0 <= dd.proxy_a_distance <= 2.0
