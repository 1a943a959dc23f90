from __future__ import annotations

import argparse
from pathlib import Path

from salatt.commands.options import (
    add_config_options,
    add_data_dir_option,
    add_profile_option,
    data_dir_flags,
    emit,
    resolve_config,
)
from salatt.core.structlog_config import bind_run_context
from salatt.schemas.run_config import RunConfig
from salatt.services.evaluation_service import EvaluationService
from salatt.services.experiment_service import ExperimentService


def add_dataset_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", default="val", help="val, train or a dataset file path")


def dataset_path(settings: RunConfig, choice: str) -> Path:
    if choice == "val":
        return settings.val_path
    if choice == "train":
        return settings.train_path
    return Path(choice)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="evaluate a checkpoint")
    parser.add_argument("--checkpoint", type=Path, default=None)
    add_dataset_option(parser)
    add_profile_option(parser)
    add_data_dir_option(parser)
    add_config_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = resolve_config(args, {"checkpoint_path": args.checkpoint, **data_dir_flags(args)})
    bind_run_context("eval", settings.seed)
    experiments = ExperimentService()
    settings.require_paths("features_path", "train_path")
    model, store = experiments.restore(settings, settings.checkpoint_path)
    blocks = experiments.load_blocks(settings)
    vocab = experiments.answer_vocab(settings)
    samples = experiments.load_split(settings, dataset_path(settings, args.dataset), blocks, vocab)

    report = EvaluationService(vocab).evaluate(model, store.values(), samples)
    emit("variant", model.variant.value)
    emit("count", report.count)
    emit("vqa_accuracy", report.vqa_accuracy)
    emit("top1_accuracy", report.top1_accuracy)
    for question_type, accuracy in report.by_question_type.items():
        emit(f"vqa_accuracy.{question_type}", accuracy)
    return 0
