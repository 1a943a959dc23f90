"""
Tensor values and the reverse-mode tape.

A Tensor is an immutable float64 array. Operations in ``salatt.core.ops`` record
a Node on the active Tape whenever one of their inputs is tracked (a leaf with
``requires_grad`` or the output of an earlier recorded node). Nodes are appended
in execution order, so the node list is always topologically sorted and
``Tape.backward`` is a single reversed sweep.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from salatt.core.exceptions import ArgumentError

Array = NDArray[np.float64]
BackwardFn = Callable[[Array], Sequence[Array | None]]

DTYPE = np.float64


class Tensor:
    """Dense, immutable, row-major float64 array with an optional gradient flag."""

    __slots__ = ("_data", "requires_grad")

    def __init__(self, data: ArrayLike, requires_grad: bool = False) -> None:
        arr = np.array(data, dtype=DTYPE)
        arr.setflags(write=False)
        self._data: Array = arr
        self.requires_grad = requires_grad

    @classmethod
    def wrap(cls, arr: Array, requires_grad: bool = False) -> Tensor:
        """Adopt a freshly computed array without copying it."""
        out = cls.__new__(cls)
        if arr.dtype != DTYPE:
            arr = arr.astype(DTYPE)
        arr.setflags(write=False)
        out._data = arr
        out.requires_grad = requires_grad
        return out

    @classmethod
    def zeros(cls, *shape: int) -> Tensor:
        return cls.wrap(np.zeros(shape, dtype=DTYPE))

    @property
    def data(self) -> Array:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def ndim(self) -> int:
        return self._data.ndim

    def item(self) -> float:
        return float(self._data.reshape(-1)[0]) if self._data.size == 1 else float(self._data)

    def numpy(self) -> Array:
        """Writable copy of the underlying data."""
        return self._data.copy()

    def detach(self) -> Tensor:
        return Tensor.wrap(self._data)

    def with_grad(self) -> Tensor:
        return Tensor.wrap(self._data, requires_grad=True)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self._data)))

    def __len__(self) -> int:
        return self._data.shape[0]

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"


@dataclass(eq=False)
class Node:
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


@dataclass(frozen=True)
class BackwardFault:
    op: str
    factor: float


_active_tape: ContextVar[Tape | None] = ContextVar("active_tape", default=None)
_backward_fault: ContextVar[BackwardFault | None] = ContextVar("backward_fault", default=None)


@dataclass(eq=False)
class Tape:
    """Ordered record of differentiable operations and the gradients they produce."""

    nodes: list[Node] = field(default_factory=list)
    gradients: dict[int, Tensor] = field(default_factory=dict)
    _produced: set[int] = field(default_factory=set)
    _token: Any = None

    def __enter__(self) -> Tape:
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc: object) -> None:
        _active_tape.reset(self._token)
        self._token = None

    def is_tracked(self, t: Tensor) -> bool:
        return t.requires_grad or id(t) in self._produced

    def record(self, op: str, inputs: tuple[Tensor, ...], output: Tensor, backward: BackwardFn) -> None:
        self.nodes.append(Node(op, inputs, output, backward))
        self._produced.add(id(output))

    def backward(self, loss: Tensor) -> None:
        """Propagate d(loss)/d(node) for every recorded node; loss must be a scalar."""
        if loss.size != 1:
            raise ArgumentError(f"backward needs a scalar loss, got shape {loss.shape}")
        fault = _backward_fault.get()
        grads: dict[int, Array] = {id(loss): np.ones(loss.shape, dtype=DTYPE)}
        for node in reversed(self.nodes):
            g_out = grads.get(id(node.output))
            if g_out is None:
                continue
            in_grads = node.backward(g_out)
            if fault is not None and node.op == fault.op:
                in_grads = [None if g is None else g * fault.factor for g in in_grads]
            for inp, g in zip(node.inputs, in_grads, strict=True):
                if g is None or not self.is_tracked(inp):
                    continue
                key = id(inp)
                if key in grads:
                    grads[key] = grads[key] + g
                else:
                    grads[key] = g
        self.gradients = {key: Tensor.wrap(np.asarray(g, dtype=DTYPE)) for key, g in grads.items()}

    def gradient(self, t: Tensor) -> Tensor:
        """Gradient of the last backward() w.r.t. ``t``; zeros when ``t`` did not reach the loss."""
        found = self.gradients.get(id(t))
        if found is None:
            return Tensor.wrap(np.zeros(t.shape, dtype=DTYPE))
        return found


def active_tape() -> Tape | None:
    return _active_tape.get()


def record(op: str, inputs: tuple[Tensor, ...], out: Array, backward: BackwardFn) -> Tensor:
    """Wrap ``out`` and register it on the active tape when any input is tracked."""
    result = Tensor.wrap(out)
    tape = _active_tape.get()
    if tape is not None and any(tape.is_tracked(t) for t in inputs):
        tape.record(op, inputs, result, backward)
    return result


@contextmanager
def inject_backward_fault(op: str, factor: float = 1.5) -> Iterator[None]:
    """Scale the input gradients of every ``op`` node during backward (negative-control hook)."""
    token = _backward_fault.set(BackwardFault(op, factor))
    try:
        yield
    finally:
        _backward_fault.reset(token)
