"""
Differentiable tensor kernels.

Every function takes and returns ``Tensor`` values, computes its forward pass
with numpy, and registers a backward closure on the active tape. Shape checks
are strict: mismatches raise ``DimensionError`` naming both shapes, invalid
arguments raise ``ArgumentError``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from salatt.core.exceptions import ArgumentError, shape_mismatch
from salatt.core.rng import RngState
from salatt.core.tensor import DTYPE, Array, Tensor, record
from salatt.models.enums import Mode


def _require_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise shape_mismatch(op, a.shape, b.shape)


def _require_ndim(op: str, t: Tensor, *allowed: int) -> None:
    if t.ndim not in allowed:
        raise ArgumentError(f"{op}: expected rank in {allowed}, got shape {t.shape}")


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product a[p x q] @ b[q x r]; ``b`` may also be a q-vector (result: p-vector)."""
    _require_ndim("matmul", a, 2)
    _require_ndim("matmul", b, 1, 2)
    if a.shape[1] != b.shape[0]:
        raise shape_mismatch("matmul", a.shape, b.shape)
    a_data, b_data = a.data, b.data

    def backward(g: Array) -> tuple[Array, Array]:
        if b_data.ndim == 1:
            return np.outer(g, b_data), a_data.T @ g
        return g @ b_data.T, a_data.T @ g

    return record("matmul", (a, b), a_data @ b_data, backward)


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Affine map x @ w.T + b for a vector x[in] or a row block x[N x in]; w[out x in], b[out]."""
    _require_ndim("linear", x, 1, 2)
    _require_ndim("linear", w, 2)
    if x.shape[-1] != w.shape[1]:
        raise shape_mismatch("linear", x.shape, w.shape)
    if b.shape != (w.shape[0],):
        raise shape_mismatch("linear", w.shape, b.shape)
    x_data, w_data = x.data, w.data

    def backward(g: Array) -> tuple[Array, Array, Array]:
        if x_data.ndim == 1:
            return g @ w_data, np.outer(g, x_data), g
        return g @ w_data, g.T @ x_data, g.sum(axis=0)

    return record("linear", (x, w, b), x_data @ w_data.T + b.data, backward)


def transpose(a: Tensor) -> Tensor:
    _require_ndim("transpose", a, 2)
    return record("transpose", (a,), a.data.T.copy(), lambda g: (g.T,))


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    if int(np.prod(shape)) != a.size:
        raise shape_mismatch("reshape", a.shape, shape)
    original = a.shape
    return record("reshape", (a,), a.data.reshape(shape).copy(), lambda g: (g.reshape(original),))


# ---------------------------------------------------------------------------
# Elementwise
# ---------------------------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("add", a, b)
    return record("add", (a, b), a.data + b.data, lambda g: (g, g))


def ewmul(a: Tensor, b: Tensor) -> Tensor:
    """Element-wise (Hadamard) product of identically shaped tensors."""
    _require_same_shape("ewmul", a, b)
    a_data, b_data = a.data, b.data
    return record("ewmul", (a, b), a_data * b_data, lambda g: (g * b_data, g * a_data))


def scale(a: Tensor, factor: float) -> Tensor:
    return record("scale", (a,), a.data * factor, lambda g: (g * factor,))


def sigmoid(x: Tensor) -> Tensor:
    # tanh form never overflows: sigma(x) = (1 + tanh(x/2)) / 2
    out = 0.5 * (1.0 + np.tanh(0.5 * x.data))
    return record("sigmoid", (x,), out, lambda g: (g * out * (1.0 - out),))


def tanh_op(x: Tensor) -> Tensor:
    out = np.tanh(x.data)
    return record("tanh", (x,), out, lambda g: (g * (1.0 - out * out),))


# ---------------------------------------------------------------------------
# Reductions and normalizers
# ---------------------------------------------------------------------------


def sum_all(x: Tensor) -> Tensor:
    shape = x.shape
    return record("sum", (x,), np.asarray(x.data.sum(), dtype=DTYPE), lambda g: (np.full(shape, float(g), dtype=DTYPE),))


def dot(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("dot", a, b)
    _require_ndim("dot", a, 1)
    a_data, b_data = a.data, b.data
    out = np.asarray(a_data @ b_data, dtype=DTYPE)
    return record("dot", (a, b), out, lambda g: (float(g) * b_data, float(g) * a_data))


def softmax(x: Tensor) -> Tensor:
    """Numerically stable softmax over a k-vector (max-subtraction)."""
    _require_ndim("softmax", x, 1)
    if x.shape[0] < 1:
        raise ArgumentError("softmax: needs at least one entry")
    e = np.exp(x.data - x.data.max())
    out = e / e.sum()

    def backward(g: Array) -> tuple[Array]:
        return (out * (g - g @ out),)

    return record("softmax", (x,), out, backward)


def max_pool_rows(x: Tensor) -> tuple[Tensor, list[int]]:
    """
    Column-wise maximum over the rows of x[N x d].

    Returns the pooled d-vector and, per column, the winning row index. Ties
    go to the lowest row index; only winners receive gradient.
    """
    _require_ndim("max_pool_rows", x, 2)
    if x.shape[0] < 1:
        raise ArgumentError("max_pool_rows: needs at least one row")
    winners = np.argmax(x.data, axis=0)
    cols = np.arange(x.shape[1])
    out = x.data[winners, cols]
    shape = x.shape

    def backward(g: Array) -> tuple[Array]:
        grad = np.zeros(shape, dtype=DTYPE)
        grad[winners, cols] = g
        return (grad,)

    return record("max_pool_rows", (x,), out.copy(), backward), [int(i) for i in winners]


def mean_rows(x: Tensor) -> Tensor:
    _require_ndim("mean_rows", x, 2)
    n = x.shape[0]
    shape = x.shape
    return record("mean_rows", (x,), x.data.mean(axis=0), lambda g: (np.broadcast_to(g / n, shape).copy(),))


# ---------------------------------------------------------------------------
# Structural
# ---------------------------------------------------------------------------


def concat(parts: Sequence[Tensor]) -> Tensor:
    """Order-preserving concatenation of vectors."""
    if not parts:
        raise ArgumentError("concat: needs a nonempty list of vectors")
    for p in parts:
        _require_ndim("concat", p, 1)
    sizes = [p.shape[0] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def backward(g: Array) -> list[Array]:
        return list(np.split(g, splits))

    return record("concat", tuple(parts), np.concatenate([p.data for p in parts]), backward)


def stack_rows(rows: Sequence[Tensor]) -> Tensor:
    """Stack N d-vectors into an N x d matrix."""
    if not rows:
        raise ArgumentError("stack_rows: needs at least one row")
    first = rows[0].shape
    for r in rows:
        _require_ndim("stack_rows", r, 1)
        if r.shape != first:
            raise shape_mismatch("stack_rows", first, r.shape)
    return record("stack_rows", tuple(rows), np.stack([r.data for r in rows]), lambda g: list(g))


def take_row(x: Tensor, index: int) -> Tensor:
    _require_ndim("take_row", x, 2)
    if not 0 <= index < x.shape[0]:
        raise ArgumentError(f"take_row: index {index} out of range for {x.shape[0]} rows")
    shape = x.shape

    def backward(g: Array) -> tuple[Array]:
        grad = np.zeros(shape, dtype=DTYPE)
        grad[index] = g
        return (grad,)

    return record("take_row", (x,), x.data[index].copy(), backward)


def tile_rows(x: Tensor, n: int) -> Tensor:
    """Repeat a d-vector into an n x d matrix."""
    _require_ndim("tile_rows", x, 1)
    if n < 1:
        raise ArgumentError(f"tile_rows: n must be positive, got {n}")
    return record("tile_rows", (x,), np.tile(x.data, (n, 1)), lambda g: (g.sum(axis=0),))


def scale_rows(weights: Tensor, x: Tensor) -> Tensor:
    """Multiply row i of x[N x d] by weights[i]."""
    _require_ndim("scale_rows", weights, 1)
    _require_ndim("scale_rows", x, 2)
    if weights.shape[0] != x.shape[0]:
        raise shape_mismatch("scale_rows", weights.shape, x.shape)
    w_data, x_data = weights.data, x.data

    def backward(g: Array) -> tuple[Array, Array]:
        return (g * x_data).sum(axis=1), g * w_data[:, None]

    return record("scale_rows", (weights, x), x_data * w_data[:, None], backward)


# ---------------------------------------------------------------------------
# Loss and regularization
# ---------------------------------------------------------------------------


def cross_entropy(logits: Tensor, label: int) -> Tensor:
    """-log softmax(logits)[label] as a scalar tensor."""
    _require_ndim("cross_entropy", logits, 1)
    classes = logits.shape[0]
    if not 0 <= label < classes:
        raise ArgumentError(f"cross_entropy: label {label} out of range for {classes} classes")
    z = logits.data - logits.data.max()
    log_norm = np.log(np.exp(z).sum())
    loss = np.asarray(log_norm - z[label], dtype=DTYPE)
    probs = np.exp(z - log_norm)

    def backward(g: Array) -> tuple[Array]:
        grad = probs.copy()
        grad[label] -= 1.0
        return (grad * float(g),)

    return record("cross_entropy", (logits,), loss, backward)


def dropout(x: Tensor, rate: float, mode: Mode, rng: RngState | None) -> Tensor:
    """Inverted dropout: zero with probability ``rate``, scale survivors by 1/(1-rate); identity in eval."""
    if not 0.0 <= rate < 1.0:
        raise ArgumentError(f"dropout: rate must be in [0, 1), got {rate}")
    if mode is Mode.EVAL or rate == 0.0:
        return x
    if rng is None:
        raise ArgumentError("dropout: train mode needs an RngState")
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep).astype(DTYPE) / keep
    return record("dropout", (x,), x.data * mask, lambda g: (g * mask,))
