"""Pipeline orchestration and report rendering.

The renderer is pure: every number in a report is taken verbatim from a
module output, never recomputed here.  Report files carry no wall-clock
data so fixed-seed runs are byte-identical; timestamps go to the log.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import distance as distance_mod
from .catalog import Catalog
from .corpus import Corpus
from .errors import ValidationError
from .evaluation import (
    PredictionSet,
    ScoreMatrix,
    build_score_matrix,
    subset_accuracies,
)
from .slicer import Slice, instantiate
from .stats import (
    AnalysisConfig,
    AnalysisResult,
    collinearity_filter,
    random_subset_baseline,
    run_analysis,
)


@dataclass(frozen=True)
class FullReport:
    """Everything one analysis run produced, ready for rendering."""

    config_digest: str
    seeds: tuple[int, ...]
    slices: tuple[Slice, ...]
    scores: ScoreMatrix
    analysis: AnalysisResult
    distances: tuple[distance_mod.DomainDistance, ...]
    line: Optional[distance_mod.DistanceLine]


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write-then-rename so readers never observe partial files."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def config_digest(config: AnalysisConfig, extra: Optional[dict] = None) -> str:
    doc = asdict(config)
    # jobs only parallelizes; results (and thus the digest) must not depend
    # on it.
    doc.pop("jobs", None)
    if extra:
        doc.update(extra)
    blob = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def resolve_retained(
    scores: ScoreMatrix, config: AnalysisConfig
) -> list[str]:
    names = [n for n in scores.feature_names if n != "source_accuracy"]
    if config.retained_override is not None:
        missing = [n for n in config.retained_override if n not in names]
        if missing:
            raise ValidationError(f"unknown capability column(s): {missing}")
        return list(config.retained_override)
    matrix = np.column_stack([scores.column(n) for n in names])
    return collinearity_filter(matrix, names, config.collinearity_mode)


def analyze_pipeline(
    corpus: Corpus,
    preds: Sequence[PredictionSet],
    catalog: Catalog,
    config: AnalysisConfig = AnalysisConfig(),
    slice_split: str = "validation",
    distance_seed: int = 0,
    vocab_size: int = distance_mod.DEFAULT_VOCAB_SIZE,
) -> FullReport:
    """Slice, score, run the statistics, and compute domain distances."""
    if slice_split == "validation":
        slice_target = corpus.source_eval_split()
    elif slice_split == "all":
        slice_target = corpus.source_examples()
    else:
        raise ValidationError(f"slice split must be 'validation' or 'all', got {slice_split!r}")
    eval_split = corpus.source_eval_split()
    slices = instantiate(catalog, slice_target)
    if slice_split == "all":
        # Score columns are defined on the evaluation split only.
        eval_ids = {e.id for e in eval_split}
        slices = [
            Slice(
                capability_name=s.capability_name,
                member_ids=frozenset(s.member_ids & eval_ids),
                coverage=len(s.member_ids & eval_ids) / len(eval_split),
            )
            for s in slices
        ]
    scores = build_score_matrix(preds, corpus, slices)
    retained = resolve_retained(scores, config)
    config = AnalysisConfig(
        alpha=config.alpha,
        seeds=config.seeds,
        noise_sigma=config.noise_sigma,
        collinearity_mode=config.collinearity_mode,
        retained_override=tuple(retained),
        jobs=config.jobs,
    )

    by_name = {s.capability_name: s for s in slices}
    sizes = [len(by_name[name].member_ids) for name in retained]
    eval_ids_ordered = [e.id for e in eval_split]
    pseudo = random_subset_baseline(eval_ids_ordered, sizes, config.seeds)
    subset_scores = {
        seed: subset_accuracies(preds, eval_split, pseudo[seed])
        for seed in config.seeds
    }

    analysis = run_analysis(scores, config, subset_scores)

    source_examples = corpus.source_examples()
    distances = tuple(
        distance_mod.compute_distance(
            source_examples,
            corpus.domain(dom),
            corpus.source_domain,
            dom,
            split_seed=distance_seed,
            vocab_size=vocab_size,
        )
        for dom in corpus.target_domains
    )
    line = None
    if len(distances) >= 2:
        try:
            line = distance_mod.improvement_vs_distance(distances, analysis)
        except Exception:
            line = None

    return FullReport(
        config_digest=config_digest(config, {"distance_seed": distance_seed}),
        seeds=config.seeds,
        slices=tuple(slices),
        scores=scores,
        analysis=analysis,
        distances=distances,
        line=line,
    )


def report_to_dict(report: FullReport) -> dict:
    """Machine-readable form of a report (the `analysis.json` payload)."""
    a = report.analysis
    doc = {
        "config_digest": report.config_digest,
        "seed_count": a.seed_count,
        "alpha": a.alpha,
        "noise_sigma": a.noise_sigma,
        "retained_capabilities": list(a.retained_capabilities),
        "slices": [
            {
                "capability": s.capability_name,
                "member_count": len(s.member_ids),
                "coverage": s.coverage,
            }
            for s in report.slices
        ],
        "domains": [
            {
                "domain": d.domain,
                "baseline_adj_r2": d.baseline_adj_r2,
                "capability_adj_r2": d.capability_adj_r2,
                "random_subset_adj_r2": d.random_subset_adj_r2,
                "noise_adj_r2": d.noise_adj_r2,
                "f_statistic": d.f_test.f_statistic,
                "df": [d.f_test.df_numerator, d.f_test.df_denominator],
                "p_value": d.f_test.p_value,
                "significant": d.significant,
                "improvement": d.capability_adj_r2 - d.baseline_adj_r2,
            }
            for d in a.domains
        ],
        "mean_improvement": a.mean_improvement(),
        "distances": [
            {
                "source": dd.source,
                "target": dd.target,
                "classifier_error": dd.classifier_error,
                "proxy_a_distance": dd.proxy_a_distance,
            }
            for dd in report.distances
        ],
        "distance_fit": (
            {
                "slope": report.line.slope,
                "intercept": report.line.intercept,
                "points": [
                    {"domain": p[0], "distance": p[1], "improvement": p[2]}
                    for p in report.line.points
                ],
            }
            if report.line is not None
            else None
        ),
    }
    return doc


def _csv(rows: Sequence[Sequence[object]]) -> str:
    def cell(v) -> str:
        if isinstance(v, float):
            return _fmt(v)
        return str(v)

    return "\n".join(",".join(cell(v) for v in row) for row in rows) + "\n"


def render_report_files(doc: dict, out_dir: Union[str, Path]) -> list[Path]:
    """Render analysis JSON into markdown + CSV files; returns paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, text: str) -> None:
        path = out_dir / name
        atomic_write_text(path, text)
        written.append(path)

    emit("analysis.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")

    rows = [["capability", "member_count", "coverage"]]
    for s in doc["slices"]:
        rows.append([s["capability"], s["member_count"], s["coverage"]])
    emit("capability_summary.csv", _csv(rows))

    rows = [
        [
            "domain",
            "setting",
            "adjusted_r2",
            "f_statistic",
            "p_value",
            "significant",
        ]
    ]
    for d in doc["domains"]:
        rows.append([d["domain"], "source_only", d["baseline_adj_r2"], "", "", ""])
        rows.append(
            [
                d["domain"],
                "capabilities",
                d["capability_adj_r2"],
                d["f_statistic"],
                d["p_value"],
                d["significant"],
            ]
        )
        if d["random_subset_adj_r2"] is not None:
            rows.append(
                [d["domain"], "random_subset", d["random_subset_adj_r2"], "", "", ""]
            )
        rows.append([d["domain"], "noise", d["noise_adj_r2"], "", "", ""])
    emit("analysis.csv", _csv(rows))

    rows = [
        [
            "domain",
            "source_only",
            "capabilities",
            "random_subset",
            "noise",
            "significant",
        ]
    ]
    for d in doc["domains"]:
        rows.append(
            [
                d["domain"],
                d["baseline_adj_r2"],
                d["capability_adj_r2"],
                d["random_subset_adj_r2"] if d["random_subset_adj_r2"] is not None else "",
                d["noise_adj_r2"],
                d["significant"],
            ]
        )
    means = {
        key: float(np.mean([d[key] for d in doc["domains"]]))
        for key in ("baseline_adj_r2", "capability_adj_r2", "noise_adj_r2")
    }
    random_vals = [
        d["random_subset_adj_r2"]
        for d in doc["domains"]
        if d["random_subset_adj_r2"] is not None
    ]
    rows.append(
        [
            "MEAN",
            means["baseline_adj_r2"],
            means["capability_adj_r2"],
            float(np.mean(random_vals)) if random_vals else "",
            means["noise_adj_r2"],
            "",
        ]
    )
    emit("comparison.csv", _csv(rows))

    rows = [["target", "classifier_error", "proxy_a_distance"]]
    for dd in doc["distances"]:
        rows.append([dd["target"], dd["classifier_error"], dd["proxy_a_distance"]])
    emit("distance.csv", _csv(rows))

    if doc["distance_fit"] is not None:
        rows = [["domain", "distance", "improvement"]]
        for p in doc["distance_fit"]["points"]:
            rows.append([p["domain"], p["distance"], p["improvement"]])
        emit("scatter.csv", _csv(rows))
        emit(
            "distance_fit.csv",
            _csv([["slope", "intercept"],
                  [doc["distance_fit"]["slope"], doc["distance_fit"]["intercept"]]]),
        )

    emit("report.md", render_markdown(doc))
    return written


def render_markdown(doc: dict) -> str:
    lines = []
    lines.append("# Capability generalizability report")
    lines.append("")
    lines.append(f"- config digest: `{doc['config_digest']}`")
    lines.append(f"- baseline seeds: {doc['seed_count']}")
    lines.append(f"- significance level: {doc['alpha']}")
    lines.append(f"- noise sigma: {_fmt(doc['noise_sigma'])}")
    lines.append(
        "- retained capabilities: " + ", ".join(doc["retained_capabilities"])
    )
    lines.append("")
    lines.append("## Capability slices")
    lines.append("")
    lines.append("| capability | members | coverage |")
    lines.append("|---|---:|---:|")
    for s in doc["slices"]:
        lines.append(
            f"| {s['capability']} | {s['member_count']} | {_fmt(s['coverage'])} |"
        )
    lines.append("")
    lines.append("## Predicting target-domain accuracy (adjusted R^2 per setting)")
    lines.append("")
    lines.append(
        "| domain | source only | + capabilities | + random subsets | + noise | F | p | significant |"
    )
    lines.append("|---|---:|---:|---:|---:|---:|---:|---|")
    for d in doc["domains"]:
        rand = (
            _fmt(d["random_subset_adj_r2"])
            if d["random_subset_adj_r2"] is not None
            else "-"
        )
        lines.append(
            f"| {d['domain']} | {_fmt(d['baseline_adj_r2'])} | "
            f"{_fmt(d['capability_adj_r2'])} | {rand} | {_fmt(d['noise_adj_r2'])} | "
            f"{_fmt(d['f_statistic'])} | {_fmt(d['p_value'])} | "
            f"{'yes' if d['significant'] else 'no'} |"
        )
    n_sig = sum(d["significant"] for d in doc["domains"])
    lines.append("")
    lines.append(
        f"Capabilities add a significant signal on {n_sig}/{len(doc['domains'])} "
        f"target domains; mean adjusted-R^2 improvement "
        f"{_fmt(doc['mean_improvement'])}."
    )
    lines.append("")
    lines.append("## Domain distances")
    lines.append("")
    lines.append("| target | classifier error | proxy A-distance |")
    lines.append("|---|---:|---:|")
    for dd in doc["distances"]:
        lines.append(
            f"| {dd['target']} | {_fmt(dd['classifier_error'])} | "
            f"{_fmt(dd['proxy_a_distance'])} |"
        )
    lines.append("")
    if doc["distance_fit"] is not None:
        lines.append(
            f"Improvement vs. distance: slope {_fmt(doc['distance_fit']['slope'])}, "
            f"intercept {_fmt(doc['distance_fit']['intercept'])} "
            f"(see scatter.csv)."
        )
    else:
        lines.append(
            "Improvement-vs-distance line omitted (fewer than two target domains "
            "or degenerate design)."
        )
    lines.append("")
    return "\n".join(lines)


def write_score_matrix(scores: ScoreMatrix, out_dir: Union[str, Path]) -> list[Path]:
    """Delimited export: feature table plus one target table per domain."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = [["model_id", *scores.feature_names]]
    for i, mid in enumerate(scores.model_ids):
        rows.append([mid, *[float(v) for v in scores.features[i]]])
    path = out_dir / "scores.csv"
    atomic_write_text(path, _csv(rows))
    written.append(path)
    for dom, vec in scores.targets.items():
        rows = [["model_id", "accuracy"]]
        for mid, v in zip(scores.model_ids, vec):
            rows.append([mid, float(v)])
        path = out_dir / f"target_{dom}.csv"
        atomic_write_text(path, _csv(rows))
        written.append(path)
    return written
