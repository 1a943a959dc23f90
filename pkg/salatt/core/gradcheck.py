"""Central finite-difference verification of tape gradients."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from salatt.core.exceptions import ArgumentError, EvaluationError
from salatt.core.tensor import DTYPE, Tape, Tensor

DENOMINATOR_FLOOR = 1e-8

ScalarFn = Callable[[Tensor], Tensor]


def _evaluate(f: ScalarFn, x: Tensor) -> float:
    value = f(x)
    if value.size != 1:
        raise ArgumentError(f"grad_check: function must return a scalar, got shape {value.shape}")
    result = value.item()
    if not np.isfinite(result):
        raise EvaluationError(f"grad_check: non-finite function value {result}")
    return result


def analytic_gradient(f: ScalarFn, x: Tensor) -> np.ndarray:
    leaf = x.with_grad()
    with Tape() as tape:
        out = f(leaf)
    if out.size != 1:
        raise ArgumentError(f"grad_check: function must return a scalar, got shape {out.shape}")
    if not np.isfinite(out.item()):
        raise EvaluationError(f"grad_check: non-finite function value {out.item()}")
    tape.backward(out)
    return tape.gradient(leaf).numpy()


def numeric_gradient(f: ScalarFn, x: Tensor, h: float = 1e-5) -> np.ndarray:
    base = x.numpy().reshape(-1)
    grad = np.zeros_like(base)
    for i in range(base.size):
        original = base[i]
        base[i] = original + h
        f_plus = _evaluate(f, Tensor(base.reshape(x.shape)))
        base[i] = original - h
        f_minus = _evaluate(f, Tensor(base.reshape(x.shape)))
        base[i] = original
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad.reshape(x.shape)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Worst coordinate-wise |a - n| / max(|a|, |n|, 1e-8)."""
    if analytic.size == 0:
        return 0.0
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), DENOMINATOR_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


def grad_check(f: ScalarFn, x: Tensor, h: float = 1e-5) -> float:
    """Max relative error between the tape gradient of ``f`` at ``x`` and central differences."""
    analytic = analytic_gradient(f, Tensor(x.data.astype(DTYPE)))
    numeric = numeric_gradient(f, x, h)
    return relative_error(analytic, numeric)
