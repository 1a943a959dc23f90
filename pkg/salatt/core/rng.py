"""Seeded, splittable random streams on numpy's Philox counter-based generator."""

from __future__ import annotations

import zlib

import numpy as np


class RngState:
    """
    A reproducible random stream.

    The same (seed, path) always yields a bit-identical sequence. ``derive``
    splits off an independent child stream keyed by name or number, so separate
    consumers (initialization, dropout, batch sampling) never share draws.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()) -> None:
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.path = path
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=path)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def derive(self, *keys: str | int) -> RngState:
        extra = tuple(_key_to_int(k) for k in keys)
        return RngState(self.seed, self.path + extra)

    def uniform(self, low: float, high: float, shape: tuple[int, ...]) -> np.ndarray:
        return self.generator.uniform(low, high, size=shape)

    def normal(self, shape: tuple[int, ...], scale: float = 1.0) -> np.ndarray:
        return self.generator.normal(0.0, scale, size=shape)

    def integers(self, high: int, size: int) -> np.ndarray:
        return self.generator.integers(0, high, size=size)

    def integer(self, high: int) -> int:
        return int(self.generator.integers(0, high))

    def random(self, shape: tuple[int, ...]) -> np.ndarray:
        return self.generator.random(size=shape)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, path={self.path})"


def _key_to_int(key: str | int) -> int:
    if isinstance(key, int):
        return key & 0xFFFFFFFF
    return zlib.crc32(key.encode("utf-8"))
