"""Synthetic corpora and model populations with known ground truth.

The simulator builds texts from filler tokens and independently injects
each capability's keyword with the domain's mixture weight as inclusion
probability (so slice coverages converge to the weights), then samples
per-model correctness from

    P(correct) = clamp(base_skill_m + sum_c signal_dc * offset_mc * contains(e, c))

so every expected accuracy has a closed form (exact enumeration over
keyword compositions).  It exists to validate the whole pipeline (slicing,
scoring, regression, ANOVA, distances) end to end without training a real
model.  Injections are independent per capability; a categorical scheme
would make the slices partition the data and render source accuracy an
exact linear combination of slice accuracies.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import yaml

from .catalog import Capability, Catalog, KeywordRule
from .corpus import Corpus, Example, NEGATIVE, POSITIVE
from .errors import InputError, ValidationError
from .evaluation import PredictionSet
from .slicer import tokenize, matches
from .stats import fit_ols
from .errors import NumericalError

_MIXTURE_TOL = 1e-9

DEFAULT_FILLER_VOCAB = (
    "the", "a", "this", "item", "product", "quality", "arrived", "package",
    "works", "fine", "great", "good", "nice", "solid", "color", "size",
    "price", "value", "fast", "shipping", "box", "bought", "use", "used",
    "day", "week", "home", "kitchen", "table", "clean", "easy", "setup",
    "design", "material", "feels", "looks", "overall", "pretty", "happy",
    "sturdy",
)


@dataclass(frozen=True)
class SimCapability:
    name: str
    keywords: tuple[str, ...]
    offset_scale: float = 0.0  # per-model offsets drawn from N(0, scale^2)

    def rule(self) -> KeywordRule:
        return KeywordRule.from_strings(self.keywords)


@dataclass(frozen=True)
class SimDomain:
    name: str
    mixture: tuple[float, ...]  # over capabilities; sums to 1
    signal: Optional[tuple[float, ...]] = None  # offset multipliers, default 1


@dataclass(frozen=True)
class SimConfig:
    capabilities: tuple[SimCapability, ...]
    source: SimDomain
    targets: tuple[SimDomain, ...]
    model_count: int = 100
    examples_per_domain: int = 200
    base_skill: tuple[float, float] = (0.65, 0.8)  # uniform range per model
    observation_noise: float = 0.0
    validation_fraction: float = 0.5
    master_seed: int = 0
    filler_vocab: tuple[str, ...] = DEFAULT_FILLER_VOCAB

    def __post_init__(self):
        if self.model_count < 1:
            raise ValidationError("model_count must be at least 1")
        if self.examples_per_domain < 1:
            raise ValidationError("examples_per_domain must be at least 1")
        if not self.capabilities:
            raise ValidationError("need at least one simulated capability")
        if not 0.0 <= self.validation_fraction <= 1.0:
            raise ValidationError("validation_fraction must lie in [0, 1]")
        lo, hi = self.base_skill
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValidationError("base_skill range must satisfy 0 <= lo <= hi <= 1")
        names = {self.source.name}
        for dom in self.domains():
            self._check_domain(dom)
        for t in self.targets:
            if t.name in names:
                raise ValidationError(f"duplicate domain name {t.name!r}")
            names.add(t.name)

    def _check_domain(self, dom: SimDomain) -> None:
        if len(dom.mixture) != len(self.capabilities):
            raise ValidationError(
                f"domain {dom.name!r}: mixture length {len(dom.mixture)} does not "
                f"match capability count {len(self.capabilities)}"
            )
        if any(w < 0 for w in dom.mixture):
            raise ValidationError(f"domain {dom.name!r}: negative mixture weight")
        if abs(sum(dom.mixture) - 1.0) > _MIXTURE_TOL:
            raise ValidationError(
                f"domain {dom.name!r}: mixture weights sum to {sum(dom.mixture)}, not 1"
            )
        if dom.signal is not None and len(dom.signal) != len(self.capabilities):
            raise ValidationError(
                f"domain {dom.name!r}: signal length does not match capability count"
            )

    def domains(self) -> list[SimDomain]:
        return [self.source, *self.targets]

    def signal_of(self, dom: SimDomain) -> np.ndarray:
        if dom.signal is None:
            return np.ones(len(self.capabilities))
        return np.asarray(dom.signal, dtype=np.float64)

    def model_ids(self) -> list[str]:
        width = max(3, len(str(self.model_count - 1)))
        return [f"m{i:0{width}d}" for i in range(self.model_count)]


@dataclass(frozen=True)
class GroundTruth:
    """Closed-form expectations for a simulated population.

    Because keyword injections are independent Bernoulli draws, every
    expectation is an exact sum over the 2^C keyword compositions, with the
    clamp applied inside each term.
    """

    model_ids: tuple[str, ...]
    base_skill: np.ndarray  # (M,)
    offsets: np.ndarray  # (M, C)
    capability_names: tuple[str, ...]
    expected_source_accuracy: np.ndarray  # (M,)
    expected_target_accuracy: dict[str, np.ndarray]  # domain -> (M,)
    expected_slice_accuracy: np.ndarray  # (M, C), on the source domain
    expected_coefficients: dict[str, Optional[np.ndarray]]


def _seed_roots(cfg: SimConfig):
    root = np.random.SeedSequence(cfg.master_seed)
    corpus_ss, skills_ss, preds_ss = root.spawn(3)
    return corpus_ss, skills_ss, preds_ss


def draw_skills(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-model base skills and per-capability offsets, seed-derived."""
    _, skills_ss, _ = _seed_roots(cfg)
    rng = np.random.default_rng(skills_ss)
    lo, hi = cfg.base_skill
    base = rng.uniform(lo, hi, size=cfg.model_count)
    scales = np.array([c.offset_scale for c in cfg.capabilities])
    offsets = rng.normal(0.0, 1.0, size=(cfg.model_count, len(scales))) * scales
    return base, offsets


def catalog_for(cfg: SimConfig) -> Catalog:
    """Catalog matching the simulated capabilities, for slicing sim corpora."""
    caps = tuple(
        Capability(
            name=c.name,
            description="simulated capability",
            origin="simulation",
            instantiation=c.rule(),
        )
        for c in cfg.capabilities
    )
    return Catalog(capabilities=caps)


def generate_corpus(cfg: SimConfig) -> Corpus:
    """Synthesize all domains; deterministic given the master seed."""
    corpus_ss, _, _ = _seed_roots(cfg)
    domain_seeds = corpus_ss.spawn(len(cfg.domains()))
    keyword_tokens = [
        [kw.lower().split() for kw in c.keywords] for c in cfg.capabilities
    ]
    examples: list[Example] = []
    n_val = round(cfg.validation_fraction * cfg.examples_per_domain)
    for dom, seed in zip(cfg.domains(), domain_seeds):
        rng = np.random.default_rng(seed)
        mixture = np.asarray(dom.mixture)
        is_source = dom.name == cfg.source.name
        for i in range(cfg.examples_per_domain):
            length = int(rng.integers(8, 15))
            toks = list(rng.choice(cfg.filler_vocab, size=length))
            draws = rng.random(len(mixture))
            for cap_idx, weight in enumerate(mixture):
                if draws[cap_idx] >= weight:
                    continue
                options = keyword_tokens[cap_idx]
                kw = options[int(rng.integers(len(options)))]
                pos = int(rng.integers(0, len(toks) + 1))
                toks[pos:pos] = kw
            label = POSITIVE if rng.random() < 0.5 else NEGATIVE
            split = None
            if is_source:
                split = "validation" if i < n_val else "train"
            examples.append(
                Example(
                    id=f"{dom.name}-{i:05d}",
                    text=" ".join(toks),
                    label=label,
                    domain=dom.name,
                    split=split,
                )
            )
    return Corpus(
        examples=tuple(examples),
        source_domain=cfg.source.name,
        target_domains=tuple(t.name for t in cfg.targets),
    )


def _contains_matrix(cfg: SimConfig, examples: Sequence[Example]) -> np.ndarray:
    """(examples, capabilities) 0/1 keyword containment, via real matching."""
    rules = [c.rule() for c in cfg.capabilities]
    out = np.zeros((len(examples), len(rules)))
    for i, e in enumerate(examples):
        toks = tokenize(e.text)
        for j, rule in enumerate(rules):
            out[i, j] = matches(rule, toks)
    return out


def correctness_probabilities(
    cfg: SimConfig, corpus: Corpus
) -> tuple[np.ndarray, list[Example]]:
    """(models, examples) correctness probabilities before sampling."""
    base, offsets = draw_skills(cfg)
    examples = list(corpus.examples)
    contains = _contains_matrix(cfg, examples)
    signal = np.zeros_like(contains)
    by_name = {d.name: d for d in cfg.domains()}
    for i, e in enumerate(examples):
        signal[i] = cfg.signal_of(by_name[e.domain])
    effect = offsets @ (contains * signal).T  # (M, E)
    prob = np.clip(base[:, None] + effect, 0.0, 1.0)
    return prob, examples


def generate_predictions(cfg: SimConfig, corpus: Corpus) -> list[PredictionSet]:
    """Sample per-model predictions; one derived seed stream per model."""
    _, _, preds_ss = _seed_roots(cfg)
    prob, examples = correctness_probabilities(cfg, corpus)
    if cfg.observation_noise > 0.0:
        noise_rng = np.random.default_rng(preds_ss.spawn(1)[0])
        prob = np.clip(
            prob + noise_rng.normal(0.0, cfg.observation_noise, size=prob.shape),
            0.0,
            1.0,
        )
    model_seeds = preds_ss.spawn(cfg.model_count)
    flip = {POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}
    out = []
    for m, model_id in enumerate(cfg.model_ids()):
        rng = np.random.default_rng(model_seeds[m])
        correct = rng.random(len(examples)) < prob[m]
        preds = {
            e.id: (e.label if ok else flip[e.label])
            for e, ok in zip(examples, correct)
        }
        out.append(PredictionSet(model_id=model_id, predictions=preds))
    return out


def _expected_accuracy(
    base: np.ndarray,
    offsets: np.ndarray,
    weights: np.ndarray,
    gamma: np.ndarray,
    force_present: Optional[int] = None,
) -> np.ndarray:
    """Exact expectation of clamp(base + sum_c gamma_c*offset_c*X_c).

    X_c are independent Bernoulli(weights[c]); ``force_present`` conditions
    on one capability's keyword being in the example (slice membership).
    """
    n_caps = len(weights)
    total = np.zeros_like(base)
    for bits in itertools.product((0, 1), repeat=n_caps):
        p = 1.0
        for c, bit in enumerate(bits):
            if c == force_present:
                if not bit:
                    p = 0.0
                    break
                continue
            p *= weights[c] if bit else 1.0 - weights[c]
        if p == 0.0:
            continue
        effect = offsets @ (np.asarray(bits, dtype=np.float64) * gamma)
        total += p * np.clip(base + effect, 0.0, 1.0)
    return total


def ground_truth(cfg: SimConfig) -> GroundTruth:
    """Analytic expected accuracies and population regression coefficients."""
    base, offsets = draw_skills(cfg)
    cap_names = tuple(c.name for c in cfg.capabilities)
    unit = np.ones(len(cap_names))
    src_weights = np.asarray(cfg.source.mixture)
    slice_acc = np.column_stack(
        [
            _expected_accuracy(base, offsets, src_weights, unit, force_present=j)
            for j in range(len(cap_names))
        ]
    )

    def domain_accuracy(dom: SimDomain) -> np.ndarray:
        return _expected_accuracy(
            base, offsets, np.asarray(dom.mixture), cfg.signal_of(dom)
        )

    source_acc = domain_accuracy(cfg.source)
    target_acc = {t.name: domain_accuracy(t) for t in cfg.targets}

    # Population regression of each target accuracy on source accuracy plus
    # the slice accuracies, mirroring the capability-augmented fit the
    # analysis runs on sampled scores.
    coefficients: dict[str, Optional[np.ndarray]] = {}
    design = np.column_stack([source_acc, slice_acc])
    for t in cfg.targets:
        try:
            coefficients[t.name] = fit_ols(design, target_acc[t.name]).coefficients
        except (NumericalError, ValidationError):
            coefficients[t.name] = None

    return GroundTruth(
        model_ids=tuple(cfg.model_ids()),
        base_skill=base,
        offsets=offsets,
        capability_names=cap_names,
        expected_source_accuracy=source_acc,
        expected_target_accuracy=target_acc,
        expected_slice_accuracy=slice_acc,
        expected_coefficients=coefficients,
    )


def write_ground_truth(gt: GroundTruth, path: Union[str, Path]) -> None:
    doc = {
        "model_ids": list(gt.model_ids),
        "capability_names": list(gt.capability_names),
        "base_skill": gt.base_skill.tolist(),
        "offsets": gt.offsets.tolist(),
        "expected_source_accuracy": gt.expected_source_accuracy.tolist(),
        "expected_target_accuracy": {
            k: v.tolist() for k, v in gt.expected_target_accuracy.items()
        },
        "expected_slice_accuracy": gt.expected_slice_accuracy.tolist(),
        "expected_coefficients": {
            k: (v.tolist() if v is not None else None)
            for k, v in gt.expected_coefficients.items()
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def parse_sim_config(path: Union[str, Path]) -> SimConfig:
    """Read a simulation config file, reporting every invalid field found."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"simulation config not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise InputError(f"malformed simulation config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError(f"{path}: top level must be a mapping")
    problems: list[str] = []

    def domain_from(entry, label: str) -> Optional[SimDomain]:
        if not isinstance(entry, dict) or "name" not in entry or "mixture" not in entry:
            problems.append(f"{label}: needs 'name' and 'mixture'")
            return None
        signal = entry.get("signal")
        return SimDomain(
            name=str(entry["name"]),
            mixture=tuple(float(w) for w in entry["mixture"]),
            signal=tuple(float(s) for s in signal) if signal is not None else None,
        )

    caps = []
    for i, entry in enumerate(raw.get("capabilities", []) or []):
        if not isinstance(entry, dict) or "name" not in entry or "keywords" not in entry:
            problems.append(f"capabilities[{i}]: needs 'name' and 'keywords'")
            continue
        caps.append(
            SimCapability(
                name=str(entry["name"]),
                keywords=tuple(str(k) for k in entry["keywords"]),
                offset_scale=float(entry.get("offset_scale", 0.0)),
            )
        )
    if not caps:
        problems.append("capabilities: at least one entry required")
    source = domain_from(raw.get("source"), "source")
    targets = []
    for i, entry in enumerate(raw.get("targets", []) or []):
        dom = domain_from(entry, f"targets[{i}]")
        if dom is not None:
            targets.append(dom)
    if not targets:
        problems.append("targets: at least one entry required")
    if problems:
        raise ValidationError(
            "invalid simulation config: " + "; ".join(problems)
        )

    kwargs = {}
    for key, cast in (
        ("model_count", int),
        ("examples_per_domain", int),
        ("observation_noise", float),
        ("validation_fraction", float),
        ("master_seed", int),
    ):
        if key in raw:
            kwargs[key] = cast(raw[key])
    if "base_skill" in raw:
        kwargs["base_skill"] = tuple(float(v) for v in raw["base_skill"])
    if "filler_vocab" in raw:
        kwargs["filler_vocab"] = tuple(str(v) for v in raw["filler_vocab"])
    return SimConfig(
        capabilities=tuple(caps), source=source, targets=tuple(targets), **kwargs
    )
