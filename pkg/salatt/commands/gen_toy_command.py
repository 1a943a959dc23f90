from __future__ import annotations

import argparse
from pathlib import Path

from salatt.commands.options import add_config_options, emit, resolve_config
from salatt.core.rng import RngState
from salatt.core.structlog_config import bind_run_context, get_logger
from salatt.repositories.dataset_repository import DatasetRepository, to_record
from salatt.repositories.feature_repository import FeatureRepository
from salatt.services.evaluation_service import majority_baseline
from salatt.services.toy_task_service import build_toy_task

log = get_logger(__name__)

FEATURES_FILE = "features.bin"
TRAIN_FILE = "train.jsonl"
VAL_FILE = "val.jsonl"
QUESTIONS_FILE = "questions.txt"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen-toy", help="generate the synthetic toy task")
    parser.add_argument("--output-dir", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--patterns", type=int, default=None)
    parser.add_argument("--questions", type=int, default=None)
    parser.add_argument("--noise", type=float, default=None)
    parser.add_argument("--train-size", type=int, default=None)
    parser.add_argument("--val-size", type=int, default=None)
    parser.add_argument("--d-i", type=int, default=None)
    add_config_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = resolve_config(
        args,
        {
            "output_dir": args.output_dir,
            "seed": args.seed,
            "toy_patterns": args.patterns,
            "toy_questions": args.questions,
            "toy_noise": args.noise,
            "toy_train_size": args.train_size,
            "toy_val_size": args.val_size,
            "d_i": args.d_i,
        },
    )
    bind_run_context("gen-toy", settings.seed)
    spec = settings.toy_spec()
    task = build_toy_task(spec, RngState(settings.seed).derive("toy"))

    out = Path(settings.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    features = FeatureRepository()
    features.write_features(out / FEATURES_FILE, task.blocks, grid=spec.grid, d_i=spec.d_i)
    datasets = DatasetRepository()
    datasets.write_records(out / TRAIN_FILE, [to_record(s) for s in task.train])
    datasets.write_records(out / VAL_FILE, [to_record(s) for s in task.val])
    (out / QUESTIONS_FILE).write_text("\n".join(task.question_vocab.words) + "\n", encoding="utf-8")

    answers = sorted({s.answer for s in task.train + task.val})
    emit("seed", settings.seed)
    emit("patterns", spec.patterns)
    emit("questions", spec.questions)
    emit("noise", spec.noise)
    emit("d_i", spec.d_i)
    emit("grid", f"{spec.grid.g},{spec.grid.m},{spec.grid.s}")
    emit("regions", spec.grid.region_total)
    emit("train", len(task.train))
    emit("val", len(task.val))
    emit("question_words", len(task.question_vocab.words))
    emit("answers", len(answers))
    emit("majority_baseline", majority_baseline(task.val))
    emit("output_dir", out)
    log.info("Toy task written", output_dir=str(out), images=len(task.blocks))
    return 0
