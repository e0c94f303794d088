"""Command-line front end: `model-runner --corpus ... --out ...`."""

from __future__ import annotations

import argparse
import logging
import sys

from .runner import run_population
from .spec import DEFAULT_SEEDS, InputError, RunSpec, RunnerError, ValidationError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="model-runner",
        description=(
            "Fine-tune one classifier per random seed on the source domain "
            "of a corpus file and export all predictions as JSON lines."
        ),
    )
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    parser.add_argument("--out", required=True, help="predictions output path")
    parser.add_argument("--source", required=True, help="source domain name")
    parser.add_argument(
        "--targets",
        default="",
        help="comma-separated target domain names (may be empty)",
    )
    parser.add_argument(
        "--base-model",
        default="tiny-random",
        help="pretrained checkpoint name, or 'tiny-random' (default)",
    )
    parser.add_argument(
        "--seeds",
        default=None,
        help="comma-separated seed list (default: 0..99)",
    )
    parser.add_argument("--epochs", type=int, default=2)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--learning-rate", type=float, default=5e-4)
    parser.add_argument("--max-length", type=int, default=64)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    seeds = (
        tuple(int(s) for s in args.seeds.split(",")) if args.seeds else DEFAULT_SEEDS
    )
    targets = tuple(t for t in args.targets.split(",") if t)
    try:
        spec = RunSpec(
            corpus_path=args.corpus,
            output_path=args.out,
            source_domain=args.source,
            target_domains=targets,
            base_model=args.base_model,
            seeds=seeds,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            max_length=args.max_length,
            device=args.device,
        )
        summary = run_population(spec)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except RunnerError as exc:
        print(f"runner error: {exc}", file=sys.stderr)
        return 3
    print(
        f"trained {len(summary.trained_seeds)} model(s), "
        f"{len(summary.failed_seeds)} failed; "
        f"predictions for {summary.example_count} examples in {summary.output_path}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
