from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from salatt.core.tensor import Tensor

FEATURE_MAGIC = b"SALATTF1"


class RegionGrid(BaseModel):
    """g x g grid cells; square regions of m x m cells placed every s cells."""

    model_config = ConfigDict(frozen=True)

    g: int = Field(ge=1, description="grid cells per image side")
    m: int = Field(ge=1, description="region side in grid cells")
    s: int = Field(ge=1, description="stride in grid cells")

    @model_validator(mode="after")
    def _region_fits(self) -> RegionGrid:
        if self.m > self.g:
            raise ValueError(f"region size m={self.m} exceeds grid size g={self.g}")
        return self

    @property
    def n(self) -> int:
        """Regions per side."""
        return (self.g - self.m) // self.s + 1

    @property
    def region_total(self) -> int:
        return self.n * self.n


class RegionFeatureBlock(BaseModel):
    """Per-region features of one image, rows in row-major region order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: RegionGrid
    d_i: int = Field(ge=1)
    features: Tensor

    @model_validator(mode="after")
    def _shape_matches_grid(self) -> RegionFeatureBlock:
        expected = (self.grid.region_total, self.d_i)
        if self.features.shape != expected:
            raise ValueError(f"features shape {self.features.shape} does not match expected {expected}")
        if not self.features.is_finite():
            raise ValueError("region features contain non-finite values")
        return self

    @property
    def region_total(self) -> int:
        return self.grid.region_total


class FeatureFileHeader(BaseModel):
    model_config = ConfigDict(frozen=True)

    magic: bytes = FEATURE_MAGIC
    g: int = Field(ge=1, lt=2**32)
    m: int = Field(ge=1, lt=2**32)
    s: int = Field(ge=1, lt=2**32)
    d_i: int = Field(ge=1, lt=2**32)
    count: int = Field(ge=0, lt=2**32)

    @property
    def grid(self) -> RegionGrid:
        return RegionGrid(g=self.g, m=self.m, s=self.s)

    @property
    def floats_per_image(self) -> int:
        return self.grid.region_total * self.d_i
