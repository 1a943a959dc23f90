from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from salatt.models.enums import Variant
from salatt.schemas.region import RegionGrid


class ModelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: Variant = Variant.SALATT
    d_i: int = Field(gt=0, description="region feature dimension")
    embed_dim: int = Field(gt=0)
    layers: int = Field(gt=0, description="question LSTM layers (l)")
    hidden: int = Field(gt=0, description="question LSTM units per layer (r)")
    d_c: int = Field(gt=0, description="common-space dimension")
    vocab_size: int = Field(gt=0)
    answer_count: int = Field(gt=0)
    dropout_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    grid: RegionGrid = RegionGrid(g=4, m=2, s=1)
    init_range: float = Field(default=0.08, gt=0.0)

    @property
    def d_q(self) -> int:
        """Question representation size: final h and c of every layer."""
        return 2 * self.layers * self.hidden

    @property
    def classifier_input(self) -> int:
        return 2 * self.d_c if self.variant is Variant.TRAATT else self.d_c
