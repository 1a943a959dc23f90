"""
Global test configuration and shared fixtures.

Dimensions follow the gradient-check profile unless a test states otherwise,
so every forward pass stays in the millisecond range.
"""

import numpy as np
import pytest

from salatt.core.rng import RngState
from salatt.core.tensor import Tensor
from salatt.models.enums import Profile, Variant
from salatt.schemas.dataset import REFERENCE_COUNT, VqaSample
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.region import RegionFeatureBlock, RegionGrid
from salatt.schemas.run_config import load_run_config
from salatt.schemas.toy_task import ToyTaskSpec

DEFAULT_GRID = RegionGrid(g=4, m=2, s=1)


@pytest.fixture
def rng() -> RngState:
    return RngState(1234)


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def small_config() -> ModelConfig:
    """d_I=8, d_C=6, l=1, r=5, n=3, vocab=11, answers=4."""
    return load_run_config(profile=Profile.GRADCHECK).model_settings(Variant.SALATT)


def make_block(values: np.ndarray, grid: RegionGrid = DEFAULT_GRID) -> RegionFeatureBlock:
    return RegionFeatureBlock(grid=grid, d_i=values.shape[1], features=Tensor(values))


def make_sample(block: RegionFeatureBlock, question: tuple[int, ...], answer: str, label: int | None = None) -> VqaSample:
    return VqaSample(
        features=block,
        question=question,
        answer=answer,
        answer_label=label,
        reference_answers=(answer,) * REFERENCE_COUNT,
    )


@pytest.fixture
def random_block(np_rng: np.random.Generator, small_config: ModelConfig) -> RegionFeatureBlock:
    return make_block(np_rng.normal(size=(small_config.grid.region_total, small_config.d_i)))


@pytest.fixture
def labeled_samples(np_rng: np.random.Generator, small_config: ModelConfig) -> list[VqaSample]:
    samples = []
    for i in range(6):
        block = make_block(np_rng.normal(size=(small_config.grid.region_total, small_config.d_i)))
        question = tuple(int(t) for t in np_rng.integers(1, small_config.vocab_size, size=3))
        label = i % small_config.answer_count
        samples.append(make_sample(block, question, str(label), label))
    return samples


@pytest.fixture
def tiny_toy_spec() -> ToyTaskSpec:
    return ToyTaskSpec(patterns=4, questions=2, noise=0.3, d_i=8, grid=DEFAULT_GRID, train_size=40, val_size=12)
