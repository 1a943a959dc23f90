"""
Region grid geometry and synthetic region features.

Regions are enumerated row-major: index = row * n + col, where the region at
(row, col) covers grid cells [row*s, row*s + m) x [col*s, col*s + m).
"""

from __future__ import annotations

import numpy as np

from salatt.core.exceptions import ArgumentError
from salatt.core.rng import RngState
from salatt.core.tensor import Tensor
from salatt.schemas.region import RegionFeatureBlock, RegionGrid
from salatt.schemas.toy_task import ToyTaskSpec

Rectangle = tuple[int, int, int, int]


def region_count(g: int, m: int, s: int) -> int:
    """Regions per side: floor((g - m) / s) + 1."""
    if g < 1 or m < 1 or s < 1:
        raise ArgumentError(f"grid parameters must be positive, got g={g} m={m} s={s}")
    if m > g:
        raise ArgumentError(f"region size m={m} exceeds grid size g={g}")
    return (g - m) // s + 1


def region_bounds(grid: RegionGrid, index: int, image_side: int) -> Rectangle:
    """Pixel rectangle (x0, y0, x1, y1) of region ``index`` on a square image."""
    if image_side % grid.g != 0:
        raise ArgumentError(f"image side {image_side} is not divisible by grid size {grid.g}")
    if not 0 <= index < grid.region_total:
        raise ArgumentError(f"region index {index} out of range for {grid.region_total} regions")
    cell = image_side // grid.g
    row, col = divmod(index, grid.n)
    x0 = col * grid.s * cell
    y0 = row * grid.s * cell
    side = grid.m * cell
    return x0, y0, x0 + side, y0 + side


def region_index(grid: RegionGrid, bounds: Rectangle, image_side: int) -> int:
    """Inverse of region_bounds."""
    cell = image_side // grid.g
    x0, y0, _, _ = bounds
    return (y0 // (cell * grid.s)) * grid.n + x0 // (cell * grid.s)


def region_name(grid: RegionGrid, index: int) -> str:
    row, col = divmod(index, grid.n)
    return f"r{row}c{col}"


def normalize_block(block: RegionFeatureBlock) -> RegionFeatureBlock:
    """Scale every region vector to unit L2 norm (zero vectors stay zero)."""
    data = block.features.data
    norms = np.linalg.norm(data, axis=1, keepdims=True)
    scaled = np.divide(data, norms, out=np.zeros_like(data), where=norms > 0)
    return RegionFeatureBlock(grid=block.grid, d_i=block.d_i, features=Tensor.wrap(scaled))


def pattern_prototypes(spec: ToyTaskSpec, rng: RngState) -> np.ndarray:
    """
    P random directions of norm sqrt(d_I), drawn once per seed.

    Entries are O(1), so the noise level reads as a per-entry signal-to-noise ratio.
    """
    if spec.patterns < 1:
        raise ArgumentError(f"toy task needs at least one pattern, got {spec.patterns}")
    raw = rng.derive("prototypes").normal((spec.patterns, spec.d_i))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    return raw / norms * np.sqrt(spec.d_i)


def synth_features(
    spec: ToyTaskSpec,
    rng: RngState,
    prototypes: np.ndarray | None = None,
    pattern: int | None = None,
) -> tuple[RegionFeatureBlock, int, int]:
    """
    One synthetic image: a uniformly chosen region carries prototype p plus noise,
    every other region carries noise only.

    ``pattern`` fixes the planted prototype instead of drawing it uniformly.
    Returns (block, planted region index, pattern id).
    """
    if spec.patterns < 1:
        raise ArgumentError(f"toy task needs at least one pattern, got {spec.patterns}")
    if spec.noise < 0:
        raise ArgumentError(f"noise level must be non-negative, got {spec.noise}")
    protos = pattern_prototypes(spec, rng) if prototypes is None else prototypes
    regions = spec.grid.region_total
    region = rng.integer(regions)
    drawn = rng.integer(spec.patterns)
    if pattern is None:
        pattern = drawn
    elif not 0 <= pattern < spec.patterns:
        raise ArgumentError(f"pattern {pattern} out of range for {spec.patterns} prototypes")
    features = rng.normal((regions, spec.d_i), scale=spec.noise) if spec.noise > 0 else np.zeros((regions, spec.d_i))
    features[region] += protos[pattern]
    block = RegionFeatureBlock(grid=spec.grid, d_i=spec.d_i, features=Tensor.wrap(features))
    return block, region, pattern
