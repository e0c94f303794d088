"""Statistics engine: OLS with adjusted R-squared, nested-model ANOVA,
collinearity pruning, and the random-subset / noisy-accuracy baselines.

Least squares is solved with an orthogonal decomposition (SVD via lstsq);
normal equations are deliberately avoided because capability accuracy
columns are near-collinear by construction.  F-distribution tail
probabilities are evaluated through the regularized incomplete beta
function, computed here by continued fraction.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError

# Curated retained capabilities for fixed-list collinearity mode.
FIXED_RETAINED = ("shifter", "modality", "comparative")

VIF_THRESHOLD = 10.0

_BETA_TOL = 1e-12
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class RegressionResult:
    """OLS fit summary; coefficients start with the intercept when present."""

    coefficients: np.ndarray
    r2: float
    adjusted_r2: float
    rss: float
    n: int
    p: int  # predictor count, excluding the intercept


@dataclass(frozen=True)
class FTestResult:
    f_statistic: float
    df_numerator: int
    df_denominator: int
    p_value: float


def fit_ols(
    X: np.ndarray, y: np.ndarray, include_intercept: bool = True
) -> RegressionResult:
    """Least-squares fit of y on the columns of X.

    Requires n > p + 1 and a full-rank design after intercept augmentation;
    rank deficiency is reported with the index of the offending column.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise ValidationError(f"X has {n} rows but y has {y.shape[0]} entries")
    if n <= p + 1:
        raise ValidationError(
            f"need more observations than predictors plus one (n={n}, p={p})"
        )
    if include_intercept:
        A = np.column_stack([np.ones(n), X])
    else:
        A = X

    # Pivoted QR exposes which column is linearly dependent on the others.
    _, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag.max() * max(A.shape) * np.finfo(np.float64).eps if diag.max() > 0 else 0.0
    deficient = np.nonzero(diag <= tol)[0]
    if diag.max() == 0.0 or deficient.size:
        bad = int(piv[deficient[0]]) if deficient.size else 0
        col = bad - 1 if include_intercept else bad
        name = "intercept" if include_intercept and bad == 0 else f"column {col}"
        raise NumericalError(f"design matrix is rank deficient ({name} is dependent)")

    coefficients, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    residuals = y - A @ coefficients
    rss = float(residuals @ residuals)
    if include_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    if tss <= np.finfo(np.float64).tiny:
        # Constant response: r2 defined as 0 by convention.
        r2 = 0.0
    else:
        r2 = min(max(1.0 - rss / tss, 0.0), 1.0) if include_intercept else 1.0 - rss / tss
    return RegressionResult(
        coefficients=coefficients,
        r2=r2,
        adjusted_r2=adjusted_r2(r2, n, p),
        rss=rss,
        n=n,
        p=p,
    )


def adjusted_r2(r2: float, n: int, p: int) -> float:
    """R-squared penalized for predictor count: 1 - (1-r2)(n-1)/(n-p-1)."""
    if n <= p + 1:
        raise ValidationError(f"adjusted R2 undefined for n={n}, p={p}")
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by Lentz-style continued fraction, relative tolerance 1e-12."""
    if a <= 0 or b <= 0:
        raise ValidationError(f"beta parameters must be positive (a={a}, b={b})")
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only for x < (a+1)/(a+b+2);
    # otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise NumericalError(
        f"incomplete beta continued fraction did not converge "
        f"(a={a}, b={b}, x={x})"
    )


def f_distribution_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail P(F > f) of the F distribution with (df1, df2) dfs."""
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x)


def nested_f_test(reduced: RegressionResult, full: RegressionResult) -> FTestResult:
    """ANOVA F-test of a reduced model against a nesting full model."""
    if reduced.n != full.n:
        raise ValidationError("models were fit on different sample sizes")
    q = full.p - reduced.p
    if q <= 0:
        raise ValidationError("full model must have more predictors than the reduced")
    df2 = full.n - full.p - 1
    if df2 <= 0:
        raise ValidationError("no residual degrees of freedom in the full model")
    numerator = (reduced.rss - full.rss) / q
    if numerator < 0.0:
        # Numerical artifact: nesting guarantees rss_full <= rss_reduced.
        numerator = 0.0
    if full.rss <= 0.0:
        if numerator > 0.0:
            warnings.warn("full model has zero residual; reporting p-value 0")
            return FTestResult(math.inf, q, df2, 0.0)
        return FTestResult(0.0, q, df2, 1.0)
    f = numerator / (full.rss / df2)
    return FTestResult(f, q, df2, f_distribution_sf(f, q, df2))


def collinearity_filter(
    X: np.ndarray,
    names: Sequence[str],
    mode: str = "fixed_list",
) -> list[str]:
    """Select capability columns to keep.

    mode "fixed_list" retains exactly the three curated default capabilities;
    mode "vif" iteratively drops the column with the largest variance
    inflation factor until all VIFs fall below 10.  Zero-variance columns are
    dropped (with a warning) before VIF computation.
    """
    names = list(names)
    if mode == "fixed_list":
        missing = [n for n in FIXED_RETAINED if n not in names]
        if missing:
            raise ValidationError(
                f"fixed-list mode requires columns {FIXED_RETAINED}; "
                f"missing: {', '.join(missing)}"
            )
        return list(FIXED_RETAINED)
    if mode != "vif":
        raise ValidationError(f"unknown collinearity mode {mode!r}")

    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != len(names):
        raise ValidationError("column count does not match name count")
    keep = []
    for j, name in enumerate(names):
        if np.var(X[:, j]) <= 0.0:
            warnings.warn(f"dropping zero-variance column {name!r} before VIF")
        else:
            keep.append(j)

    def vif(j: int, active: list[int]) -> float:
        others = [k for k in active if k != j]
        if not others:
            return 1.0
        fit = fit_ols(X[:, others], X[:, j])
        if fit.r2 >= 1.0:
            return math.inf
        return 1.0 / (1.0 - fit.r2)

    active = keep[:]
    while len(active) > 1:
        vifs = []
        for j in active:
            try:
                vifs.append(vif(j, active))
            except NumericalError:
                vifs.append(math.inf)
        worst = max(range(len(active)), key=lambda i: vifs[i])
        if vifs[worst] < VIF_THRESHOLD:
            break
        active.pop(worst)
    return [names[j] for j in active]


def random_subset_baseline(
    example_ids: Sequence[str],
    slice_sizes: Sequence[int],
    seeds: Sequence[int],
) -> dict[int, list[list[str]]]:
    """Per-seed pseudo-slices matching the retained capability suite sizes.

    Each seed yields len(slice_sizes) subsets drawn uniformly without
    replacement from the example ids.  Deterministic per seed.
    """
    ids = list(example_ids)
    for size in slice_sizes:
        if size <= 0:
            raise ValidationError(f"pseudo-slice size must be positive, got {size}")
        if size > len(ids):
            raise ValidationError(
                f"pseudo-slice size {size} exceeds population size {len(ids)}"
            )
    out: dict[int, list[list[str]]] = {}
    for seed in seeds:
        rng = np.random.default_rng(seed)
        out[seed] = [
            [ids[i] for i in rng.choice(len(ids), size=size, replace=False)]
            for size in slice_sizes
        ]
    return out


def noise_baseline(
    source_acc: np.ndarray,
    sigma: float,
    seeds: Sequence[int],
) -> dict[int, np.ndarray]:
    """Per-seed noisy copies of the source accuracies, clamped to [0, 1]."""
    if sigma <= 0.0:
        raise ValidationError(f"noise sigma must be positive, got {sigma}")
    source_acc = np.asarray(source_acc, dtype=np.float64)
    out = {}
    for seed in seeds:
        rng = np.random.default_rng(seed)
        noisy = source_acc + rng.normal(0.0, sigma, size=source_acc.shape)
        out[seed] = np.clip(noisy, 0.0, 1.0)
    return out


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs for the generalizability analysis."""

    alpha: float = 0.05
    seeds: tuple[int, ...] = tuple(range(100))
    noise_sigma: Union[float, str] = "auto"  # "auto" = sample std of source acc
    collinearity_mode: str = "fixed_list"
    retained_override: Optional[tuple[str, ...]] = None
    jobs: int = 1


@dataclass(frozen=True)
class DomainAnalysis:
    """Per-target-domain comparison of the four regression settings."""

    domain: str
    baseline_adj_r2: float
    capability_adj_r2: float
    f_test: FTestResult
    significant: bool
    random_subset_adj_r2: Optional[float]
    noise_adj_r2: float


@dataclass(frozen=True)
class AnalysisResult:
    domains: tuple[DomainAnalysis, ...]
    retained_capabilities: tuple[str, ...]
    alpha: float
    seed_count: int
    noise_sigma: float

    def improvement(self, domain: str) -> float:
        for d in self.domains:
            if d.domain == domain:
                return d.capability_adj_r2 - d.baseline_adj_r2
        raise KeyError(domain)

    def mean_improvement(self) -> float:
        return float(
            np.mean([d.capability_adj_r2 - d.baseline_adj_r2 for d in self.domains])
        )


def run_analysis(
    scores,
    config: AnalysisConfig = AnalysisConfig(),
    subset_scores: Optional[Mapping[int, np.ndarray]] = None,
) -> AnalysisResult:
    """Fit the four regression settings for every target domain.

    `subset_scores` maps each seed to an (M, k) matrix of model accuracies on
    that seed's random pseudo-slices (computed upstream from predictions);
    when absent, the random-subset setting is omitted from the result.
    """
    if not scores.targets:
        raise ValidationError("score matrix has no target domains")
    capability_names = [n for n in scores.feature_names if n != "source_accuracy"]
    if config.retained_override is not None:
        retained = list(config.retained_override)
        missing = [n for n in retained if n not in capability_names]
        if missing:
            raise ValidationError(
                f"retained-capability override names unknown columns: {missing}"
            )
    else:
        cap_matrix = np.column_stack(
            [scores.column(n) for n in capability_names]
        ) if capability_names else np.empty((len(scores.model_ids), 0))
        retained = collinearity_filter(
            cap_matrix, capability_names, config.collinearity_mode
        )
    if not retained:
        raise ValidationError("no capability columns retained")

    source = scores.column("source_accuracy")
    cap_cols = np.column_stack([scores.column(n) for n in retained])
    if config.noise_sigma == "auto":
        sigma = float(np.std(source, ddof=1))
        if sigma <= 0.0:
            raise ValidationError(
                "source accuracies are constant; specify noise sigma explicitly"
            )
    else:
        sigma = float(config.noise_sigma)
    noise_cols = noise_baseline(source, sigma, config.seeds)

    if subset_scores is not None:
        missing_seeds = [s for s in config.seeds if s not in subset_scores]
        if missing_seeds:
            raise ValidationError(
                f"subset scores missing for seed(s) {missing_seeds[:5]}"
            )

    def analyze_domain(domain: str) -> DomainAnalysis:
        y = scores.targets[domain]
        fit_base = fit_ols(source[:, None], y)
        fit_cap = fit_ols(np.column_stack([source, cap_cols]), y)
        ftest = nested_f_test(fit_base, fit_cap)
        random_mean = None
        if subset_scores is not None:
            vals = [
                fit_ols(np.column_stack([source, subset_scores[s]]), y).adjusted_r2
                for s in config.seeds
            ]
            random_mean = float(np.mean(vals))
        noise_vals = [
            fit_ols(np.column_stack([source, noise_cols[s]]), y).adjusted_r2
            for s in config.seeds
        ]
        return DomainAnalysis(
            domain=domain,
            baseline_adj_r2=fit_base.adjusted_r2,
            capability_adj_r2=fit_cap.adjusted_r2,
            f_test=ftest,
            significant=ftest.p_value < config.alpha,
            random_subset_adj_r2=random_mean,
            noise_adj_r2=float(np.mean(noise_vals)),
        )

    domains = list(scores.targets)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(analyze_domain, domains))
    else:
        results = [analyze_domain(d) for d in domains]

    return AnalysisResult(
        domains=tuple(results),
        retained_capabilities=tuple(retained),
        alpha=config.alpha,
        seed_count=len(config.seeds),
        noise_sigma=sigma,
    )
