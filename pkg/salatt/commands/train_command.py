from __future__ import annotations

import argparse
from pathlib import Path

from salatt.commands.options import (
    add_config_options,
    add_data_dir_option,
    add_profile_option,
    add_variant_option,
    data_dir_flags,
    emit,
    resolve_config,
)
from salatt.core.structlog_config import bind_run_context, get_logger
from salatt.repositories.metrics_repository import MetricsRepository
from salatt.services.experiment_service import ExperimentService

log = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="train one variant with early stopping")
    add_profile_option(parser)
    add_variant_option(parser)
    parser.add_argument("--max-iterations", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--checkpoint", type=Path, default=None)
    parser.add_argument("--metrics", type=Path, default=None)
    add_data_dir_option(parser)
    add_config_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = resolve_config(
        args,
        {
            "variant": args.variant,
            "max_iterations": args.max_iterations,
            "seed": args.seed,
            "checkpoint_path": args.checkpoint,
            "metrics_path": args.metrics,
            **data_dir_flags(args),
        },
    )
    bind_run_context("train", settings.seed)
    experiments = ExperimentService()
    data = experiments.load_data(settings)

    outcome = experiments.train(settings, data)
    experiments.checkpoints.save(settings.checkpoint_path, outcome.state.best_params)
    MetricsRepository().write(settings.metrics_path, outcome.state.history)

    emit("variant", outcome.model.variant.value)
    emit("iterations", outcome.state.iteration)
    emit("best_iteration", outcome.state.best_iteration)
    emit("best_val_vqa_acc", outcome.state.best_val_accuracy)
    emit("best_val_top1", outcome.report.top1_accuracy)
    emit("stopped_early", str(outcome.state.stopped_early).lower())
    emit("checkpoint", settings.checkpoint_path)
    emit("metrics", settings.metrics_path)
    return 0
