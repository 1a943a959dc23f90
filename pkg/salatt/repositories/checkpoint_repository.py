"""
salatt.repositories.checkpoint_repository
-----------------------------------------
Parameter checkpoints.

Layout (little-endian): magic ``SALATTC1``; u32 tensor count; per tensor:
u32 name length, UTF-8 name bytes, u32 rank, rank x u32 dims, float64 payload.
Tensors are written in sorted name order so identical parameters give
identical bytes.
"""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path

import numpy as np

from salatt.core.exceptions import ConfigError, FormatError
from salatt.core.optim import ParamStore
from salatt.core.structlog_config import get_logger

log = get_logger(__name__)

CHECKPOINT_MAGIC = b"SALATTC1"
_U32 = np.dtype("<u4")
_F64 = np.dtype("<f8")


class CheckpointRepository:
    def save(self, path: Path, tensors: Mapping[str, np.ndarray]) -> None:
        chunks = [CHECKPOINT_MAGIC, np.array([len(tensors)], dtype=_U32).tobytes()]
        for name in sorted(tensors):
            value = np.asarray(tensors[name], dtype=_F64)
            encoded = name.encode("utf-8")
            chunks.append(np.array([len(encoded)], dtype=_U32).tobytes())
            chunks.append(encoded)
            chunks.append(np.array([value.ndim, *value.shape], dtype=_U32).tobytes())
            chunks.append(value.tobytes())
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(b"".join(chunks))
        log.info("Checkpoint written", path=str(target), tensors=len(tensors))

    def load(self, path: Path) -> dict[str, np.ndarray]:
        raw = Path(path).read_bytes()
        reader = _Reader(raw)
        if reader.take(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
            raise FormatError("bad checkpoint magic", offset=0)
        count = reader.u32()
        tensors: dict[str, np.ndarray] = {}
        for _ in range(count):
            name = reader.take(reader.u32()).decode("utf-8")
            rank = reader.u32()
            shape = tuple(reader.u32() for _ in range(rank))
            size = int(np.prod(shape)) if shape else 1
            payload = reader.take(8 * size)
            tensors[name] = np.frombuffer(payload, dtype=_F64).astype(np.float64).reshape(shape)
        if reader.offset != len(raw):
            raise FormatError("trailing bytes after last tensor", offset=reader.offset)
        log.info("Checkpoint loaded", path=str(path), tensors=len(tensors))
        return tensors

    def restore(self, path: Path, store: ParamStore) -> None:
        """Load into ``store``; names and shapes must match the configured model exactly."""
        tensors = self.load(path)
        missing = sorted(set(store.names()) - set(tensors))
        extra = sorted(set(tensors) - set(store.names()))
        if missing or extra:
            raise ConfigError(f"checkpoint does not match model: missing {missing}, unexpected {extra}")
        for name in store.names():
            expected = store[name].shape
            found = tensors[name].shape
            if expected != found:
                raise ConfigError(f"checkpoint tensor {name}: expected shape {expected}, found {found}")
        store.load(tensors)


class _Reader:
    def __init__(self, raw: bytes) -> None:
        self.raw = raw
        self.offset = 0

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.raw):
            raise FormatError(f"truncated checkpoint: need {size} bytes", offset=self.offset)
        chunk = self.raw[self.offset : end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return int(np.frombuffer(self.take(4), dtype=_U32)[0])
