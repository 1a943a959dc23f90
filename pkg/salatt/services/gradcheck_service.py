"""
Finite-difference check of every parameter block of every variant.

Check points are drawn rather than taken from the training initializer: every
block, biases included, is uniform on [-POINT_RANGE, POINT_RANGE) so that gates
and states sit away from zero. A drawn point is accepted only when each nonzero
analytic gradient coordinate is at least GRADIENT_FLOOR; below that, central
differences at h=1e-5 are dominated by round-off and the relative error says
nothing about the gradient code.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel

from salatt.core.gradcheck import grad_check
from salatt.core.rng import RngState
from salatt.core.structlog_config import get_logger
from salatt.core.tensor import Tape, Tensor
from salatt.models.enums import Mode, Variant
from salatt.models.vqa_model import expected_shapes
from salatt.schemas.dataset import REFERENCE_COUNT, VqaSample
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.region import RegionFeatureBlock
from salatt.services.training_service import batch_loss

log = get_logger(__name__)

DEFAULT_TOLERANCE = 1e-4
QUESTION_LENGTH = 4
POINT_RANGE = 1.0
GRADIENT_FLOOR = 1e-5
MAX_DRAWS = 50


class BlockCheck(BaseModel):
    variant: Variant
    block: str
    max_relative_error: float

    def passed(self, tolerance: float) -> bool:
        return self.max_relative_error < tolerance


@dataclass(frozen=True)
class CheckPoint:
    config: ModelConfig
    params: dict[str, Tensor]
    samples: list[VqaSample]
    draw: int


def random_samples(config: ModelConfig, count: int, rng: RngState) -> list[VqaSample]:
    """Random region blocks, token ids and labels at the configured dimensions."""
    samples: list[VqaSample] = []
    for i in range(count):
        sample_rng = rng.derive("sample", i)
        features = sample_rng.normal((config.grid.region_total, config.d_i))
        tokens = tuple(int(t) for t in sample_rng.integers(config.vocab_size, QUESTION_LENGTH))
        label = sample_rng.integer(config.answer_count)
        samples.append(
            VqaSample(
                features=RegionFeatureBlock(grid=config.grid, d_i=config.d_i, features=Tensor.wrap(features)),
                question=tokens,
                answer=str(label),
                answer_label=label,
                reference_answers=(str(label),) * REFERENCE_COUNT,
            )
        )
    return samples


def random_params(config: ModelConfig, rng: RngState) -> dict[str, Tensor]:
    """Every parameter of the variant, biases included, uniform on [-POINT_RANGE, POINT_RANGE)."""
    return {
        name: Tensor(rng.derive(name).uniform(-POINT_RANGE, POINT_RANGE, shape), requires_grad=True)
        for name, shape in expected_shapes(config).items()
    }


def smallest_gradient(config: ModelConfig, params: Mapping[str, Tensor], samples: Sequence[VqaSample]) -> float:
    """Smallest nonzero |d loss / d theta| over all coordinates; inf when every gradient is zero."""
    tracked = {name: t.with_grad() for name, t in params.items()}
    with Tape() as tape:
        loss = batch_loss(config, tracked, samples, Mode.EVAL)
    tape.backward(loss)
    smallest = np.inf
    for tensor in tracked.values():
        magnitudes = np.abs(tape.gradient(tensor).data)
        nonzero = magnitudes[magnitudes > 0.0]
        if nonzero.size:
            smallest = min(smallest, float(nonzero.min()))
    return smallest


class GradCheckService:
    def __init__(self, base: ModelConfig, seed: int = 0, sample_count: int = 2, h: float = 1e-5) -> None:
        self.base = base
        self.seed = seed
        self.sample_count = sample_count
        self.h = h

    def check_point(self, variant: Variant) -> CheckPoint:
        """First draw whose gradients all clear GRADIENT_FLOOR; the last draw when none does."""
        config = self.base.model_copy(update={"variant": variant, "dropout_rate": 0.0})
        rng = RngState(self.seed).derive("gradcheck", variant.value)
        point: CheckPoint | None = None
        for draw in range(MAX_DRAWS):
            draw_rng = rng.derive("draw", draw)
            point = CheckPoint(
                config=config,
                params=random_params(config, draw_rng.derive("params")),
                samples=random_samples(config, self.sample_count, draw_rng.derive("samples")),
                draw=draw,
            )
            smallest = smallest_gradient(config, point.params, point.samples)
            if smallest >= GRADIENT_FLOOR:
                log.debug("Check point accepted", variant=variant.value, draw=draw, smallest_gradient=smallest)
                return point
        log.warning("No check point cleared the gradient floor", variant=variant.value, draws=MAX_DRAWS)
        assert point is not None
        return point

    def check_variant(self, variant: Variant) -> list[BlockCheck]:
        """Finite-difference check of the mean eval-mode loss w.r.t. every parameter block."""
        point = self.check_point(variant)
        params = point.params

        results: list[BlockCheck] = []
        for name in params:

            def loss_for(perturbed: Tensor, name: str = name) -> Tensor:
                return batch_loss(point.config, {**params, name: perturbed}, point.samples, Mode.EVAL)

            error = grad_check(loss_for, params[name], self.h)
            results.append(BlockCheck(variant=variant, block=name, max_relative_error=error))
            log.debug("Gradient block checked", variant=variant.value, block=name, error=error)
        return results

    def check(self, variants: Iterable[Variant]) -> list[BlockCheck]:
        results: list[BlockCheck] = []
        for variant in variants:
            results.extend(self.check_variant(variant))
        return results
