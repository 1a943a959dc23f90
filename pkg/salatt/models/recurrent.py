"""
LSTM cell, stacked LSTM and the summing bidirectional LSTM.

Cell update at step t (gates i, f, o and candidate u):

    i = sigma(W_i x + U_i h + b_i)
    f = sigma(W_f x + U_f h + b_f)
    o = sigma(W_o x + U_o h + b_o)
    u = tanh(W_u x + U_u h + b_u)
    c_t = u * i + c_{t-1} * f
    h_t = o * tanh(c_t)

The bidirectional output at 1-indexed position t is h_t(forward) + h_{N-t+1}(backward),
where the backward LSTM reads the reversed sequence.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from salatt.core import ops
from salatt.core.exceptions import ArgumentError, shape_mismatch
from salatt.core.optim import ParamStore
from salatt.core.rng import RngState
from salatt.core.tensor import Tensor

GATES = ("i", "f", "o", "u")


@dataclass(frozen=True)
class LstmCellParams:
    W_i: Tensor
    W_f: Tensor
    W_o: Tensor
    W_u: Tensor
    U_i: Tensor
    U_f: Tensor
    U_o: Tensor
    U_u: Tensor
    b_i: Tensor
    b_f: Tensor
    b_o: Tensor
    b_u: Tensor

    def __post_init__(self) -> None:
        hidden, inp = self.W_i.shape
        for gate in GATES:
            w, u, b = self.gate(gate)
            if w.shape != (hidden, inp):
                raise shape_mismatch(f"LstmCellParams.W_{gate}", (hidden, inp), w.shape)
            if u.shape != (hidden, hidden):
                raise shape_mismatch(f"LstmCellParams.U_{gate}", (hidden, hidden), u.shape)
            if b.shape != (hidden,):
                raise shape_mismatch(f"LstmCellParams.b_{gate}", (hidden,), b.shape)

    @property
    def hidden_size(self) -> int:
        return self.W_i.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_i.shape[1]

    def gate(self, name: str) -> tuple[Tensor, Tensor, Tensor]:
        return getattr(self, f"W_{name}"), getattr(self, f"U_{name}"), getattr(self, f"b_{name}")

    @classmethod
    def from_params(cls, params: Mapping[str, Tensor], prefix: str) -> LstmCellParams:
        return cls(**{f"{kind}_{g}": params[f"{prefix}.{kind}_{g}"] for kind in ("W", "U", "b") for g in GATES})

    @classmethod
    def register(
        cls, store: ParamStore, prefix: str, input_size: int, hidden_size: int, rng: RngState, init_range: float
    ) -> LstmCellParams:
        """Create uniformly initialized weights (biases zero) in ``store`` under ``prefix``."""
        for g in GATES:
            store.add(f"{prefix}.W_{g}", rng.uniform(-init_range, init_range, (hidden_size, input_size)))
        for g in GATES:
            store.add(f"{prefix}.U_{g}", rng.uniform(-init_range, init_range, (hidden_size, hidden_size)))
        for g in GATES:
            store.add(f"{prefix}.b_{g}", np.zeros(hidden_size))
        return cls.from_params(store.values(), prefix)

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int) -> LstmCellParams:
        fields: dict[str, Tensor] = {}
        for g in GATES:
            fields[f"W_{g}"] = Tensor.zeros(hidden_size, input_size)
            fields[f"U_{g}"] = Tensor.zeros(hidden_size, hidden_size)
            fields[f"b_{g}"] = Tensor.zeros(hidden_size)
        return cls(**fields)


@dataclass(frozen=True)
class LstmState:
    h: Tensor
    c: Tensor

    @classmethod
    def zeros(cls, hidden_size: int) -> LstmState:
        return cls(Tensor.zeros(hidden_size), Tensor.zeros(hidden_size))


@dataclass(frozen=True)
class BiLstmParams:
    forward: LstmCellParams
    backward: LstmCellParams

    def __post_init__(self) -> None:
        if (self.forward.hidden_size, self.forward.input_size) != (self.backward.hidden_size, self.backward.input_size):
            raise shape_mismatch(
                "BiLstmParams",
                (self.forward.hidden_size, self.forward.input_size),
                (self.backward.hidden_size, self.backward.input_size),
            )

    def swapped(self) -> BiLstmParams:
        return BiLstmParams(forward=self.backward, backward=self.forward)

    @classmethod
    def from_params(cls, params: Mapping[str, Tensor], prefix: str) -> BiLstmParams:
        return cls(
            forward=LstmCellParams.from_params(params, f"{prefix}.fwd"),
            backward=LstmCellParams.from_params(params, f"{prefix}.bwd"),
        )


def _gate_preactivation(p: LstmCellParams, gate: str, x: Tensor, h: Tensor) -> Tensor:
    w, u, b = p.gate(gate)
    return ops.add(ops.linear(x, w, b), ops.matmul(u, h))


def lstm_cell_step(p: LstmCellParams, x: Tensor, prev: LstmState) -> LstmState:
    """One LSTM time step."""
    if x.shape != (p.input_size,):
        raise shape_mismatch("lstm_cell_step(x)", (p.input_size,), x.shape)
    if prev.h.shape != (p.hidden_size,) or prev.c.shape != (p.hidden_size,):
        raise shape_mismatch("lstm_cell_step(prev)", (p.hidden_size,), prev.h.shape, prev.c.shape)

    i = ops.sigmoid(_gate_preactivation(p, "i", x, prev.h))
    f = ops.sigmoid(_gate_preactivation(p, "f", x, prev.h))
    o = ops.sigmoid(_gate_preactivation(p, "o", x, prev.h))
    u = ops.tanh_op(_gate_preactivation(p, "u", x, prev.h))
    c = ops.add(ops.ewmul(u, i), ops.ewmul(prev.c, f))
    h = ops.ewmul(o, ops.tanh_op(c))
    return LstmState(h=h, c=c)


def lstm_forward(layers: Sequence[LstmCellParams], seq: Sequence[Tensor]) -> tuple[list[Tensor], list[LstmState]]:
    """
    Run a stacked LSTM from zero initial states.

    Layer l consumes the output sequence of layer l-1. Returns the top layer's
    outputs and the final (h, c) of every layer, bottom first.
    """
    if not seq:
        raise ArgumentError("lstm_forward: empty input sequence")
    if not layers:
        raise ArgumentError("lstm_forward: needs at least one layer")
    for below, above in zip(layers, layers[1:], strict=False):
        if above.input_size != below.hidden_size:
            raise shape_mismatch("lstm_forward(layers)", (below.hidden_size,), (above.input_size,))

    inputs = list(seq)
    finals: list[LstmState] = []
    for layer in layers:
        state = LstmState.zeros(layer.hidden_size)
        outputs: list[Tensor] = []
        for x in inputs:
            state = lstm_cell_step(layer, x, state)
            outputs.append(state.h)
        finals.append(state)
        inputs = outputs
    return inputs, finals


def bilstm_forward(p: BiLstmParams, seq: Sequence[Tensor]) -> list[Tensor]:
    """Summed bidirectional LSTM: output[t] = h_fwd[t] + h_bwd[N-1-t] (0-indexed)."""
    if not seq:
        raise ArgumentError("bilstm_forward: empty input sequence")
    forward_out, _ = lstm_forward([p.forward], seq)
    backward_out, _ = lstm_forward([p.backward], list(reversed(seq)))
    n = len(seq)
    return [ops.add(forward_out[t], backward_out[n - 1 - t]) for t in range(n)]


def question_final_encoding(layers: Sequence[LstmCellParams], token_embeddings: Sequence[Tensor]) -> Tensor:
    """Question vector of size 2*l*r: final h of layers 1..l, then final c of layers 1..l."""
    if not token_embeddings:
        raise ArgumentError("question_final_encoding: empty question")
    _, finals = lstm_forward(layers, token_embeddings)
    return ops.concat([s.h for s in finals] + [s.c for s in finals])
