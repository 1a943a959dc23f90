"""Trainable parameter storage and the RMSprop update."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from salatt.core.exceptions import ArgumentError, shape_mismatch
from salatt.core.tensor import DTYPE, Array, Tape, Tensor


@dataclass
class ParamEntry:
    value: Tensor
    grad: Array
    rms_accumulator: Array


class ParamStore:
    """
    Named trainable tensors with their gradient and RMSprop accumulator.

    Values are leaf tensors flagged ``requires_grad``; an update replaces the
    value with a new tensor, so a tensor handed out earlier never changes.
    """

    def __init__(self) -> None:
        self._entries: dict[str, ParamEntry] = {}

    def add(self, name: str, value: Tensor | Array) -> Tensor:
        if name in self._entries:
            raise ArgumentError(f"parameter {name!r} registered twice")
        data = value.data if isinstance(value, Tensor) else np.asarray(value, dtype=DTYPE)
        tensor = Tensor(data, requires_grad=True)
        self._entries[name] = ParamEntry(
            value=tensor,
            grad=np.zeros(tensor.shape, dtype=DTYPE),
            rms_accumulator=np.zeros(tensor.shape, dtype=DTYPE),
        )
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._entries[name].value

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def names(self) -> list[str]:
        return list(self._entries)

    def entry(self, name: str) -> ParamEntry:
        return self._entries[name]

    def values(self) -> dict[str, Tensor]:
        """Snapshot of the current parameter tensors keyed by name."""
        return {name: e.value for name, e in self._entries.items()}

    def set_value(self, name: str, value: Tensor | Array) -> None:
        entry = self._entries[name]
        data = value.data if isinstance(value, Tensor) else np.asarray(value, dtype=DTYPE)
        if data.shape != entry.value.shape:
            raise shape_mismatch(f"set_value({name})", entry.value.shape, data.shape)
        entry.value = Tensor(data, requires_grad=True)

    def load(self, tensors: Mapping[str, Tensor | Array]) -> None:
        for name, value in tensors.items():
            self.set_value(name, value)

    def accumulate_gradients(self, tape: Tape, params: Mapping[str, Tensor] | None = None) -> None:
        """Add the tape's gradients w.r.t. each stored value (or the given aliases) to ``grad``."""
        for name, entry in self._entries.items():
            tensor = params[name] if params is not None else entry.value
            entry.grad += tape.gradient(tensor).data

    def zero_grad(self) -> None:
        for entry in self._entries.values():
            entry.grad.fill(0.0)

    def parameter_count(self) -> int:
        return sum(e.value.size for e in self._entries.values())

    def snapshot(self) -> dict[str, Array]:
        return {name: e.value.numpy() for name, e in self._entries.items()}


def rmsprop_step(store: ParamStore, lr: float, decay: float, epsilon: float) -> ParamStore:
    """
    One RMSprop update over every entry, then zero the gradients.

        acc <- decay * acc + (1 - decay) * g^2
        theta <- theta - lr * g / sqrt(acc + epsilon)
    """
    for name in store:
        entry = store.entry(name)
        g = entry.grad
        entry.rms_accumulator *= decay
        entry.rms_accumulator += (1.0 - decay) * g * g
        step = lr * g / np.sqrt(entry.rms_accumulator + epsilon)
        entry.value = Tensor(entry.value.data - step, requires_grad=True)
    store.zero_grad()
    return store
