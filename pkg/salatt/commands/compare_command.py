from __future__ import annotations

import argparse

from salatt.commands.options import (
    VARIANT_NAMES,
    add_config_options,
    add_data_dir_option,
    add_profile_option,
    data_dir_flags,
    resolve_config,
)
from salatt.core.exceptions import ArgumentError
from salatt.core.structlog_config import bind_run_context, get_logger
from salatt.models.enums import Variant
from salatt.services.evaluation_service import majority_baseline
from salatt.services.experiment_service import ExperimentService

log = get_logger(__name__)


def parse_variants(raw: str) -> list[Variant]:
    names = [name.strip() for name in raw.split(",") if name.strip()]
    unknown = [name for name in names if name not in VARIANT_NAMES]
    if unknown or not names:
        raise ArgumentError(f"unknown variants {unknown}; choose from {', '.join(VARIANT_NAMES)}")
    return [Variant(name) for name in names]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("compare", help="train several variants on the same data and seeds")
    parser.add_argument("--variants", default=",".join(VARIANT_NAMES), help="comma-separated variant names")
    parser.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds starting at seed")
    parser.add_argument("--max-iterations", type=int, default=None)
    add_profile_option(parser)
    add_data_dir_option(parser)
    add_config_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.seeds < 1:
        raise ArgumentError(f"--seeds must be at least 1, got {args.seeds}")
    variants = parse_variants(args.variants)
    settings = resolve_config(args, {"max_iterations": args.max_iterations, **data_dir_flags(args)})
    bind_run_context("compare", settings.seed)
    experiments = ExperimentService()
    data = experiments.load_data(settings)
    baseline = majority_baseline(data.val)

    for variant in variants:
        vqa: list[float] = []
        top1: list[float] = []
        best_iterations: list[int] = []
        for offset in range(args.seeds):
            seeded = settings.model_copy(update={"seed": settings.seed + offset})
            outcome = experiments.train(seeded, data, variant)
            vqa.append(outcome.state.best_val_accuracy)
            top1.append(outcome.report.top1_accuracy)
            best_iterations.append(outcome.state.best_iteration)
        mean_vqa = sum(vqa) / len(vqa)
        log.info("Variant compared", variant=variant.value, mean_vqa=round(mean_vqa, 6), seeds=args.seeds)
        print(
            f"variant={variant.value} vqa_accuracy={mean_vqa!r} top1_accuracy={sum(top1) / len(top1)!r} "
            f"best_iteration={sum(best_iterations) / len(best_iterations)!r} "
            f"baseline={baseline!r} margin={mean_vqa - baseline!r}",
        )
    return 0
