"""Proxy A-distance between domains via a held-out domain classifier.

The classifier is deliberately self-contained: bag-of-words counts fed to a
linear model with logistic loss, trained by full-batch gradient descent with
a fixed budget.  Absolute distance values depend on this choice; orderings
between domains are what downstream consumers rely on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse

from .corpus import Example
from .errors import ValidationError
from .slicer import tokenize

DEFAULT_VOCAB_SIZE = 5000
GD_ITERATIONS = 500
GD_STEP = 0.1
GD_L2 = 1e-3

_MIN_EXAMPLES_PER_DOMAIN = 5


@dataclass(frozen=True)
class DomainDistance:
    source: str
    target: str
    classifier_error: float
    proxy_a_distance: float


@dataclass(frozen=True)
class DistanceLine:
    """OLS fit of adjusted-R2 improvement on proxy A-distance."""

    slope: float
    intercept: float
    points: tuple[tuple[str, float, float], ...]  # (domain, distance, improvement)


def build_vocabulary(texts: Sequence[str], vocab_size: int) -> list[str]:
    """Top tokens by document frequency; ties broken lexicographically."""
    df: dict[str, int] = {}
    for text in texts:
        for tok in set(tokenize(text)):
            df[tok] = df.get(tok, 0) + 1
    ranked = sorted(df, key=lambda t: (-df[t], t))
    return ranked[:vocab_size]


def featurize(
    examples: Sequence[Example], vocab_size: int = DEFAULT_VOCAB_SIZE
) -> tuple[scipy.sparse.csr_matrix, list[str]]:
    """Token-count vectors over the document-frequency-ranked vocabulary."""
    if not examples:
        raise ValidationError("cannot featurize an empty example set")
    vocab = build_vocabulary([e.text for e in examples], vocab_size)
    index = {tok: j for j, tok in enumerate(vocab)}
    rows, cols, vals = [], [], []
    for i, e in enumerate(examples):
        counts: dict[int, int] = {}
        for tok in tokenize(e.text):
            j = index.get(tok)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j, v in counts.items():
            rows.append(i)
            cols.append(j)
            vals.append(v)
    X = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(examples), len(vocab)), dtype=np.float64
    )
    return X, vocab


def _train_logistic(X: scipy.sparse.csr_matrix, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent on mean logistic loss with L2 on weights."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for _ in range(GD_ITERATIONS):
        z = X @ w + b
        prob = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        grad_z = (prob - y) / n
        grad_w = X.T @ grad_z + GD_L2 * w
        grad_b = grad_z.sum()
        w -= GD_STEP * grad_w
        b -= GD_STEP * grad_b
    return w, b


def _stratified_split(
    n_source: int, n_target: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """80/20 train/test indices, stratified by domain, seeded shuffle."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    offset = 0
    for n in (n_source, n_target):
        perm = offset + rng.permutation(n)
        n_test = max(1, round(0.2 * n))
        test_idx.append(perm[:n_test])
        train_idx.append(perm[n_test:])
        offset += n
    return np.concatenate(train_idx), np.concatenate(test_idx)


def domain_classifier_error(
    source_examples: Sequence[Example],
    target_examples: Sequence[Example],
    split_seed: int = 0,
    vocab_size: int = DEFAULT_VOCAB_SIZE,
) -> float:
    """Held-out error of a linear classifier separating the two domains.

    Errors above 0.5 are clamped to 0.5 (a below-chance separator carries no
    distance information).  Deterministic given data, seed, and the fixed
    training hyperparameters.
    """
    for name, group in (("source", source_examples), ("target", target_examples)):
        if len(group) < _MIN_EXAMPLES_PER_DOMAIN:
            raise ValidationError(
                f"{name} domain has {len(group)} examples; "
                f"need at least {_MIN_EXAMPLES_PER_DOMAIN} for a held-out split"
            )
    combined = list(source_examples) + list(target_examples)
    X, _ = featurize(combined, vocab_size)
    y = np.concatenate(
        [np.zeros(len(source_examples)), np.ones(len(target_examples))]
    )
    train_idx, test_idx = _stratified_split(
        len(source_examples), len(target_examples), split_seed
    )
    w, b = _train_logistic(X[train_idx], y[train_idx])
    z = X[test_idx] @ w + b
    predicted = (z > 0).astype(np.float64)
    error = float(np.mean(predicted != y[test_idx]))
    return min(error, 0.5)


def proxy_a_distance(error: float) -> float:
    """2 * (1 - 2 * error); error above 0.5 is clamped with a warning."""
    if error < 0.0:
        raise ValidationError(f"classifier error cannot be negative: {error}")
    if error > 0.5:
        warnings.warn(
            f"classifier error {error:.3f} above chance; clamping to 0.5"
        )
        error = 0.5
    return 2.0 * (1.0 - 2.0 * error)


def compute_distance(
    source_examples: Sequence[Example],
    target_examples: Sequence[Example],
    source_name: str,
    target_name: str,
    split_seed: int = 0,
    vocab_size: int = DEFAULT_VOCAB_SIZE,
) -> DomainDistance:
    error = domain_classifier_error(
        source_examples, target_examples, split_seed, vocab_size
    )
    return DomainDistance(
        source=source_name,
        target=target_name,
        classifier_error=error,
        proxy_a_distance=proxy_a_distance(error),
    )


def improvement_vs_distance(distances: Sequence[DomainDistance], analysis) -> DistanceLine:
    """Regress adjusted-R2 improvement on proxy A-distance across domains."""
    from .stats import fit_ols  # local import avoids a cycle at module load

    if len(distances) < 2:
        raise ValidationError("need at least two target domains to fit a line")
    points = []
    for dd in distances:
        improvement = analysis.improvement(dd.target)
        points.append((dd.target, dd.proxy_a_distance, improvement))
    x = np.array([p[1] for p in points])
    y = np.array([p[2] for p in points])
    fit = fit_ols(x[:, None], y) if len(points) > 2 else _two_point_line(x, y)
    return DistanceLine(
        slope=float(fit.coefficients[1]),
        intercept=float(fit.coefficients[0]),
        points=tuple(points),
    )


def _two_point_line(x: np.ndarray, y: np.ndarray):
    """Exact interpolating line through two points (n=2 violates OLS pre)."""
    from .stats import RegressionResult

    if x[0] == x[1]:
        from .errors import NumericalError

        raise NumericalError("degenerate design: both domains are equidistant")
    slope = (y[1] - y[0]) / (x[1] - x[0])
    intercept = y[0] - slope * x[0]
    return RegressionResult(
        coefficients=np.array([intercept, slope]),
        r2=1.0,
        adjusted_r2=1.0,
        rss=0.0,
        n=2,
        p=1,
    )
