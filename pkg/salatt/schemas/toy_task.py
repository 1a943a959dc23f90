from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from salatt.schemas.dataset import QuestionVocab, VqaSample
from salatt.schemas.region import RegionFeatureBlock, RegionGrid


class ToyTaskSpec(BaseModel):
    """Synthetic stand-in for CNN region features and a question set."""

    model_config = ConfigDict(frozen=True)

    patterns: int = Field(default=4, description="number of pattern prototypes P")
    questions: int = Field(default=2, description="number of question templates Q (1..3)")
    noise: float = Field(default=0.5, description="per-entry Gaussian noise sigma")
    d_i: int = 32
    grid: RegionGrid = RegionGrid(g=4, m=2, s=1)
    train_size: int = 2000
    val_size: int = 200


class ToyTask(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: ToyTaskSpec
    blocks: list[RegionFeatureBlock]
    train: list[VqaSample]
    val: list[VqaSample]
    question_vocab: QuestionVocab
