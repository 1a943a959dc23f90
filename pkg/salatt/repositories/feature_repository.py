"""
salatt.repositories.feature_repository
--------------------------------------
Region feature files.

Layout (little-endian): 8-byte magic ``SALATTF1``; u32 g, m, s, d_I, count;
then count * n^2 * d_I float32 values, image-major, region-row-major,
feature-minor. Values are widened to float64 on load.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from salatt.core.exceptions import ArgumentError, FormatError
from salatt.core.structlog_config import get_logger
from salatt.core.tensor import Tensor
from salatt.schemas.region import FEATURE_MAGIC, FeatureFileHeader, RegionFeatureBlock, RegionGrid

log = get_logger(__name__)

HEADER_FIELDS = 5
HEADER_SIZE = len(FEATURE_MAGIC) + 4 * HEADER_FIELDS
_U32 = np.dtype("<u4")
_F32 = np.dtype("<f4")


class FeatureRepository:
    def read_header(self, raw: bytes) -> FeatureFileHeader:
        if len(raw) < HEADER_SIZE:
            raise FormatError(f"feature file shorter than its {HEADER_SIZE}-byte header", offset=len(raw))
        if raw[: len(FEATURE_MAGIC)] != FEATURE_MAGIC:
            raise FormatError(f"bad magic {raw[: len(FEATURE_MAGIC)]!r}, expected {FEATURE_MAGIC!r}", offset=0)
        g, m, s, d_i, count = (int(v) for v in np.frombuffer(raw, dtype=_U32, count=HEADER_FIELDS, offset=8))
        if min(g, m, s, d_i) < 1 or m > g:
            raise FormatError(f"invalid grid header g={g} m={m} s={s} d_I={d_i}", offset=8)
        return FeatureFileHeader(g=g, m=m, s=s, d_i=d_i, count=count)

    def load_features(self, path: Path) -> list[RegionFeatureBlock]:
        """All blocks of a feature file, in file order."""
        raw = Path(path).read_bytes()
        header = self.read_header(raw)
        per_image = header.floats_per_image
        expected = HEADER_SIZE + 4 * per_image * header.count
        if len(raw) != expected:
            raise FormatError(
                f"payload length {len(raw) - HEADER_SIZE} bytes disagrees with header "
                f"({header.count} images x {per_image} floats)",
                offset=min(len(raw), expected),
            )
        if header.count == 0:
            log.info("Loaded region features", path=str(path), images=0)
            return []
        payload = np.frombuffer(raw, dtype=_F32, offset=HEADER_SIZE).astype(np.float64)
        bad = np.flatnonzero(~np.isfinite(payload))
        if bad.size:
            raise FormatError("non-finite feature value", offset=HEADER_SIZE + 4 * int(bad[0]))

        grid = header.grid
        shaped = payload.reshape(header.count, grid.region_total, header.d_i)
        blocks = [RegionFeatureBlock(grid=grid, d_i=header.d_i, features=Tensor(image)) for image in shaped]
        log.info("Loaded region features", path=str(path), images=header.count, regions=grid.region_total, d_i=header.d_i)
        return blocks

    def write_features(
        self,
        path: Path,
        blocks: Sequence[RegionFeatureBlock],
        grid: RegionGrid | None = None,
        d_i: int | None = None,
    ) -> None:
        """
        Write blocks that share one grid and feature size.

        ``grid`` and ``d_i`` fix the header when ``blocks`` is empty (a count=0
        file); otherwise they default to those of the first block.
        """
        if not blocks:
            if grid is None or d_i is None:
                raise ArgumentError("write_features: an empty file needs grid and d_i for its header")
            self._write(path, FeatureFileHeader(g=grid.g, m=grid.m, s=grid.s, d_i=d_i, count=0), b"")
            return
        grid = grid or blocks[0].grid
        d_i = d_i or blocks[0].d_i
        for index, block in enumerate(blocks):
            if block.grid != grid or block.d_i != d_i:
                raise ArgumentError(f"block {index} does not share the grid/feature size of the file")
        header = FeatureFileHeader(g=grid.g, m=grid.m, s=grid.s, d_i=d_i, count=len(blocks))
        payload = np.stack([b.features.data for b in blocks]).astype(_F32)
        self._write(path, header, payload.tobytes())

    def _write(self, path: Path, header: FeatureFileHeader, payload: bytes) -> None:
        fields = np.array([header.g, header.m, header.s, header.d_i, header.count], dtype=_U32)
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(FEATURE_MAGIC + fields.tobytes() + payload)
        log.info("Wrote region features", path=str(target), images=header.count)
