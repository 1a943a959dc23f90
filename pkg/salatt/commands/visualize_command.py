from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from salatt.commands.eval_command import add_dataset_option, dataset_path
from salatt.commands.options import (
    add_config_options,
    add_data_dir_option,
    add_profile_option,
    data_dir_flags,
    emit,
    resolve_config,
)
from salatt.core.exceptions import ArgumentError
from salatt.core.structlog_config import bind_run_context, get_logger
from salatt.models.enums import Mode
from salatt.models.vqa_model import forward, predict
from salatt.services.experiment_service import ExperimentService
from salatt.services.region_service import region_bounds
from salatt.services.visualization_service import write_pgm

log = get_logger(__name__)

DEFAULT_IMAGE_SIDE = 448


def format_vector(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in values)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("visualize", help="write pre-selection and attention maps for one sample")
    parser.add_argument("--sample", type=int, required=True, help="sample index in the chosen dataset")
    parser.add_argument("--checkpoint", type=Path, default=None)
    parser.add_argument("--output-dir", type=Path, default=None)
    parser.add_argument("--image-side", type=int, default=DEFAULT_IMAGE_SIDE, help="pixel side for region rectangles")
    add_dataset_option(parser)
    add_profile_option(parser)
    add_data_dir_option(parser)
    add_config_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    settings = resolve_config(
        args,
        {"checkpoint_path": args.checkpoint, "output_dir": args.output_dir, **data_dir_flags(args)},
    )
    bind_run_context("visualize", settings.seed)
    experiments = ExperimentService()
    settings.require_paths("features_path", "train_path")
    model, store = experiments.restore(settings, settings.checkpoint_path)
    blocks = experiments.load_blocks(settings)
    vocab = experiments.answer_vocab(settings)
    samples = experiments.load_split(settings, dataset_path(settings, args.dataset), blocks, vocab)
    if not 0 <= args.sample < len(samples):
        raise ArgumentError(f"sample index {args.sample} out of range for {len(samples)} samples")

    sample = samples[args.sample]
    trace = forward(model, store.values(), sample, mode=Mode.EVAL)
    grid = model.grid
    regions = grid.region_total
    # Variants without pre-selection weigh every region equally
    preselect = trace.preselect_weights.data if trace.preselect_weights is not None else np.ones(regions)
    attention = trace.attention_map.data

    out = Path(settings.output_dir)
    preselect_path = write_pgm(out / f"sample{args.sample}_preselect.pgm", preselect, grid.n)
    attention_path = write_pgm(out / f"sample{args.sample}_attention.pgm", attention, grid.n)

    label = predict(trace)
    emit("variant", model.variant.value)
    emit("sample", args.sample)
    emit("answer", sample.answer)
    emit("predicted", vocab.answer_at(label) if label < len(vocab) else "")
    emit("preselect_weights", format_vector(preselect))
    emit("attention_weights", format_vector(attention))
    for index in range(regions):
        x0, y0, x1, y1 = region_bounds(grid, index, args.image_side)
        emit(f"region.{index}", f"{x0},{y0},{x1},{y1}")
    emit("preselect_map", preselect_path)
    emit("attention_map", attention_path)
    return 0
