"""Command-line entry point.

Subcommands mirror the pipeline stages: catalog validate, slice, evaluate,
analyze, distance, simulate, report.  Exit codes: 0 success, 1 validation
error, 2 I/O error, 3 numerical failure.  All randomness flows from
explicit seed flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import yaml

from . import distance as distance_mod
from . import simulate as sim
from .catalog import default_catalog, default_catalog_path, parse_catalog, write_catalog
from .corpus import load_corpus, write_examples
from .errors import InputError, NumericalError, ValidationError
from .evaluation import load_predictions, write_predictions
from .reports import (
    analyze_pipeline,
    atomic_write_text,
    render_report_files,
    report_to_dict,
    write_score_matrix,
)
from .slicer import instantiate
from .stats import AnalysisConfig

CONFIG_DIR_ENV = "CAPEVAL_CONFIG_DIR"


def _log(message: str) -> None:
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    print(f"[{stamp}] {message}", file=sys.stderr)


def _resolve_config_path(path: str) -> Path:
    """Look up config files in CAPEVAL_CONFIG_DIR when not found directly."""
    p = Path(path)
    if p.exists():
        return p
    config_dir = os.environ.get(CONFIG_DIR_ENV)
    if config_dir:
        candidate = Path(config_dir) / path
        if candidate.exists():
            return candidate
    return p


def _load_catalog(path: str | None):
    if path is None:
        return default_catalog()
    return parse_catalog(_resolve_config_path(path))


def _load_corpus_from_args(args):
    targets = [t for t in args.targets.split(",") if t] if args.targets else []
    source = args.source
    if args.meta:
        meta = json.loads(Path(_resolve_config_path(args.meta)).read_text())
        source = source or meta["source_domain"]
        targets = targets or list(meta["target_domains"])
    if not source:
        raise ValidationError("a source domain is required (--source or --meta)")
    return load_corpus(args.corpus, source, targets)


def _analysis_config_from_args(args) -> AnalysisConfig:
    base: dict = {}
    if getattr(args, "config", None):
        raw = yaml.safe_load(
            Path(_resolve_config_path(args.config)).read_text(encoding="utf-8")
        )
        if raw:
            base.update(raw)
    if getattr(args, "alpha", None) is not None:
        base["alpha"] = args.alpha
    if getattr(args, "seed_count", None) is not None:
        base["seed_count"] = args.seed_count
    if getattr(args, "seed", None) is not None:
        base["seed"] = args.seed
    if getattr(args, "noise_sigma", None) is not None:
        base["noise_sigma"] = args.noise_sigma
    if getattr(args, "collinearity_mode", None) is not None:
        base["collinearity_mode"] = args.collinearity_mode
    if getattr(args, "jobs", None) is not None:
        base["jobs"] = args.jobs

    seed0 = int(base.get("seed", 0))
    count = int(base.get("seed_count", 100))
    seeds = tuple(range(seed0, seed0 + count))
    noise_sigma = base.get("noise_sigma", "auto")
    if noise_sigma != "auto":
        noise_sigma = float(noise_sigma)
    retained = base.get("retained_capabilities")
    return AnalysisConfig(
        alpha=float(base.get("alpha", 0.05)),
        seeds=seeds,
        noise_sigma=noise_sigma,
        collinearity_mode=str(base.get("collinearity_mode", "fixed_list")),
        retained_override=tuple(retained) if retained else None,
        jobs=int(base.get("jobs", 1)),
    )


def cmd_catalog_validate(args) -> int:
    path = args.path or str(default_catalog_path())
    catalog = parse_catalog(_resolve_config_path(path))
    print(f"OK: {len(catalog)} capabilities ({', '.join(catalog.names())})")
    return 0


def cmd_slice(args) -> int:
    catalog = _load_catalog(args.catalog)
    corpus = _load_corpus_from_args(args)
    if args.split == "all":
        examples = corpus.source_examples()
    else:
        examples = corpus.source_eval_split()
    slices = instantiate(catalog, examples)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["capability,member_count,coverage"]
    for s in slices:
        atomic_write_text(
            out_dir / f"slice_{s.capability_name}.txt",
            "\n".join(sorted(s.member_ids)) + ("\n" if s.member_ids else ""),
        )
        lines.append(f"{s.capability_name},{len(s.member_ids)},{s.coverage:.10g}")
        _log(
            f"slice {s.capability_name}: {len(s.member_ids)} members, "
            f"coverage {s.coverage:.4f} (split={args.split})"
        )
    atomic_write_text(out_dir / "slice_summary.csv", "\n".join(lines) + "\n")
    print(f"wrote {len(slices)} slices to {out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    catalog = _load_catalog(args.catalog)
    corpus = _load_corpus_from_args(args)
    preds = load_predictions(args.predictions)
    examples = (
        corpus.source_examples()
        if args.split == "all"
        else corpus.source_eval_split()
    )
    slices = instantiate(catalog, examples)
    if args.split == "all":
        eval_ids = {e.id for e in corpus.source_eval_split()}
        from .slicer import Slice

        n_eval = len(eval_ids)
        slices = [
            Slice(s.capability_name, frozenset(s.member_ids & eval_ids),
                  len(s.member_ids & eval_ids) / n_eval)
            for s in slices
        ]
    from .evaluation import build_score_matrix

    scores = build_score_matrix(preds, corpus, slices)
    written = write_score_matrix(scores, args.out_dir)
    print(f"wrote {len(written)} score tables to {args.out_dir}")
    return 0


def cmd_analyze(args) -> int:
    catalog = _load_catalog(args.catalog)
    corpus = _load_corpus_from_args(args)
    preds = load_predictions(args.predictions)
    config = _analysis_config_from_args(args)
    report = analyze_pipeline(
        corpus,
        preds,
        catalog,
        config,
        slice_split=args.split,
        distance_seed=args.distance_seed,
        vocab_size=args.vocab_size,
    )
    doc = report_to_dict(report)
    written = render_report_files(doc, args.out_dir)
    n_sig = sum(d["significant"] for d in doc["domains"])
    print(
        f"analysis complete: {n_sig}/{len(doc['domains'])} target domains "
        f"significant at alpha={doc['alpha']}; reports in {args.out_dir}"
    )
    if doc["distance_fit"] is None and len(doc["domains"]) < 2:
        print("note: improvement-vs-distance fit omitted (fewer than two domains)")
    return 0


def cmd_distance(args) -> int:
    corpus = _load_corpus_from_args(args)
    source = corpus.source_examples()
    rows = ["target,classifier_error,proxy_a_distance"]
    for dom in corpus.target_domains:
        dd = distance_mod.compute_distance(
            source,
            corpus.domain(dom),
            corpus.source_domain,
            dom,
            split_seed=args.split_seed,
            vocab_size=args.vocab_size,
        )
        rows.append(
            f"{dom},{dd.classifier_error:.10g},{dd.proxy_a_distance:.10g}"
        )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out, "\n".join(rows) + "\n")
    print(f"wrote distances for {len(corpus.target_domains)} domains to {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = sim.parse_sim_config(_resolve_config_path(args.config))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = sim.generate_corpus(cfg)
    preds = sim.generate_predictions(cfg, corpus)
    gt = sim.ground_truth(cfg)
    write_examples(corpus.examples, out_dir / "corpus.jsonl")
    write_predictions(preds, out_dir / "predictions.jsonl")
    sim.write_ground_truth(gt, out_dir / "ground_truth.json")
    write_catalog(sim.catalog_for(cfg), out_dir / "catalog.yaml")
    atomic_write_text(
        out_dir / "meta.json",
        json.dumps(
            {
                "source_domain": corpus.source_domain,
                "target_domains": list(corpus.target_domains),
                "model_count": cfg.model_count,
                "examples_per_domain": cfg.examples_per_domain,
                "master_seed": cfg.master_seed,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
    )
    print(
        f"simulated {cfg.model_count} models over "
        f"{1 + len(cfg.targets)} domains into {out_dir}"
    )
    return 0


def cmd_report(args) -> int:
    doc = json.loads(Path(args.analysis).read_text(encoding="utf-8"))
    written = render_report_files(doc, args.out_dir)
    print(f"re-rendered {len(written)} report files into {args.out_dir}")
    return 0


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="corpus JSONL file")
    p.add_argument("--source", default=None, help="source domain name")
    p.add_argument(
        "--targets", default="", help="comma-separated target domain names"
    )
    p.add_argument(
        "--meta",
        default=None,
        help="meta.json with source/target domains (as written by `simulate`)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capeval",
        description="Capability-based evaluation harness for text classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cat = sub.add_parser("catalog", help="catalog operations")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)
    p_val = cat_sub.add_parser("validate", help="validate a catalog file")
    p_val.add_argument("path", nargs="?", default=None)
    p_val.set_defaults(func=cmd_catalog_validate)

    p_slice = sub.add_parser("slice", help="instantiate capability slices")
    p_slice.add_argument("--catalog", default=None)
    _add_corpus_args(p_slice)
    p_slice.add_argument("--split", choices=("validation", "all"), default="validation")
    p_slice.add_argument("--out-dir", required=True)
    p_slice.set_defaults(func=cmd_slice)

    p_eval = sub.add_parser("evaluate", help="score predictions into a matrix")
    p_eval.add_argument("--catalog", default=None)
    _add_corpus_args(p_eval)
    p_eval.add_argument("--predictions", required=True)
    p_eval.add_argument("--split", choices=("validation", "all"), default="validation")
    p_eval.add_argument("--out-dir", required=True)
    p_eval.set_defaults(func=cmd_evaluate)

    p_an = sub.add_parser("analyze", help="full generalizability analysis")
    p_an.add_argument("--catalog", default=None)
    _add_corpus_args(p_an)
    p_an.add_argument("--predictions", required=True)
    p_an.add_argument("--config", default=None, help="analysis config YAML")
    p_an.add_argument("--alpha", type=float, default=None)
    p_an.add_argument("--seed", type=int, default=None, help="first baseline seed")
    p_an.add_argument("--seed-count", type=int, default=None)
    p_an.add_argument("--noise-sigma", default=None)
    p_an.add_argument(
        "--collinearity-mode", choices=("fixed_list", "vif"), default=None
    )
    p_an.add_argument("--split", choices=("validation", "all"), default="validation")
    p_an.add_argument("--distance-seed", type=int, default=0)
    p_an.add_argument("--vocab-size", type=int, default=distance_mod.DEFAULT_VOCAB_SIZE)
    p_an.add_argument("--jobs", type=int, default=None)
    p_an.add_argument("--out-dir", required=True)
    p_an.set_defaults(func=cmd_analyze)

    p_dist = sub.add_parser("distance", help="proxy A-distances to targets")
    _add_corpus_args(p_dist)
    p_dist.add_argument("--split-seed", type=int, default=0)
    p_dist.add_argument("--vocab-size", type=int, default=distance_mod.DEFAULT_VOCAB_SIZE)
    p_dist.add_argument("--out", required=True)
    p_dist.set_defaults(func=cmd_distance)

    p_sim = sub.add_parser("simulate", help="generate a synthetic population")
    p_sim.add_argument("--config", required=True, help="simulation config YAML")
    p_sim.add_argument("--out-dir", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("report", help="re-render reports from analysis.json")
    p_rep.add_argument("--analysis", required=True)
    p_rep.add_argument("--out-dir", required=True)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
