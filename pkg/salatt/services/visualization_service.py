"""Weight maps as plain-text (P2) portable graymaps."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from salatt.core.exceptions import ArgumentError
from salatt.core.structlog_config import get_logger

log = get_logger(__name__)

MAX_GRAY = 255


def min_max_normalize(values: np.ndarray) -> np.ndarray:
    """Rescale to [0, 1]; a constant input maps to all zeros."""
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0.0:
        return np.zeros_like(values, dtype=np.float64)
    return (values - lo) / (hi - lo)


def to_gray_levels(weights: np.ndarray, side: int) -> np.ndarray:
    if weights.size != side * side:
        raise ArgumentError(f"{weights.size} weights do not fill a {side}x{side} map")
    levels = np.rint(min_max_normalize(np.asarray(weights, dtype=np.float64)) * MAX_GRAY).astype(np.int64)
    return levels.reshape(side, side)


def render_pgm(weights: np.ndarray, side: int) -> str:
    levels = to_gray_levels(weights, side)
    rows = [" ".join(str(v) for v in row) for row in levels]
    return "\n".join([f"P2\n{side} {side}\n{MAX_GRAY}", *rows]) + "\n"


def write_pgm(path: Path, weights: np.ndarray, side: int) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render_pgm(weights, side), encoding="ascii")
    log.info("Weight map written", path=str(target), side=side)
    return target


def read_pgm(path: Path) -> np.ndarray:
    tokens = Path(path).read_text(encoding="ascii").split()
    if tokens[0] != "P2":
        raise ArgumentError(f"{path} is not a P2 graymap")
    width, height = int(tokens[1]), int(tokens[2])
    return np.array([int(t) for t in tokens[4 : 4 + width * height]], dtype=np.int64).reshape(height, width)
