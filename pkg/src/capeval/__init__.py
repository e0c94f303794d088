"""capeval: capability-based evaluation harness for text classifiers.

Capabilities (fine-grained behavioral specifications) are instantiated as
keyword slices over multi-domain corpora; model prediction files are scored
against them; and a statistics engine tests whether capability scores help
predict out-of-distribution accuracy beyond source accuracy and chance
baselines.
"""

from .catalog import Capability, Catalog, KeywordRule, default_catalog, parse_catalog
from .corpus import Corpus, Example, balanced_sample, binarize_rating, load_corpus
from .errors import CapevalError, InputError, NumericalError, ValidationError
from .evaluation import (
    PredictionSet,
    ScoreMatrix,
    accuracy,
    build_score_matrix,
    failure_rate,
    load_predictions,
)
from .slicer import Slice, instantiate, matches, tokenize
from .stats import (
    AnalysisConfig,
    AnalysisResult,
    FTestResult,
    RegressionResult,
    adjusted_r2,
    collinearity_filter,
    fit_ols,
    nested_f_test,
    noise_baseline,
    random_subset_baseline,
    regularized_incomplete_beta,
    run_analysis,
)
from .distance import (
    DomainDistance,
    domain_classifier_error,
    featurize,
    improvement_vs_distance,
    proxy_a_distance,
)
from .simulate import SimCapability, SimConfig, SimDomain, generate_corpus, generate_predictions, ground_truth
from .reports import analyze_pipeline

__version__ = "0.1.0"
