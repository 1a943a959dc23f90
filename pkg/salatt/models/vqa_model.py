"""
The five model variants.

    SalAtt    BiLSTM pre-selection -> EWM attention -> classifier
    RegAtt    EWM attention -> classifier
    ConAtt    shared linear pre-selection -> EWM attention -> classifier
    TraAtt    inner-product attention, concat(attended, question) -> classifier
    Holistic  mean region feature, EWM fusion -> classifier

Parameters are addressed by name in a flat mapping so that the same forward
serves training (ParamStore values), gradient checks (one block swapped for a
perturbed copy) and checkpoints.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from salatt.core import ops
from salatt.core.exceptions import ConfigError, shape_mismatch
from salatt.core.optim import ParamStore
from salatt.core.rng import RngState
from salatt.core.tensor import Tensor
from salatt.models.enums import Mode, Variant
from salatt.models.recurrent import BiLstmParams, LstmCellParams, bilstm_forward, question_final_encoding
from salatt.schemas.dataset import VqaSample
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.region import RegionFeatureBlock

Params = Mapping[str, Tensor]

PRESELECT = "preselect"
CONV = "conv"
EMBEDDING = "embedding"


@dataclass(frozen=True)
class ForwardTrace:
    logits: Tensor
    attention_map: Tensor
    preselect_weights: Tensor | None = None


@dataclass(frozen=True)
class ForwardContext:
    """Dropout mode and random stream for one forward pass."""

    mode: Mode = Mode.EVAL
    rate: float = 0.0
    rng: RngState | None = None

    def drop(self, x: Tensor, site: str) -> Tensor:
        if self.mode is Mode.EVAL or self.rate == 0.0:
            return x
        return ops.dropout(x, self.rate, self.mode, self.rng.derive(site) if self.rng else None)


EVAL = ForwardContext()


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


def question_prefix(layer: int) -> str:
    return f"question.l{layer}"


def init_params(config: ModelConfig, rng: RngState) -> ParamStore:
    """All trainable tensors for ``config.variant``: weights U[-r, r), biases zero."""
    r = config.init_range
    store = ParamStore()
    store.add(EMBEDDING, rng.derive(EMBEDDING).uniform(-r, r, (config.vocab_size, config.embed_dim)))

    for layer in range(config.layers):
        input_size = config.embed_dim if layer == 0 else config.hidden
        prefix = question_prefix(layer)
        LstmCellParams.register(store, prefix, input_size, config.hidden, rng.derive(prefix), r)

    if config.variant is Variant.SALATT:
        for direction in ("fwd", "bwd"):
            prefix = f"{PRESELECT}.{direction}"
            LstmCellParams.register(store, prefix, config.d_i, 1, rng.derive(prefix), r)
    elif config.variant is Variant.CONATT:
        store.add(f"{CONV}.W", rng.derive(CONV).uniform(-r, r, (1, config.d_i)))
        store.add(f"{CONV}.b", np.zeros(1))

    store.add("v_map.W", rng.derive("v_map").uniform(-r, r, (config.d_c, config.d_i)))
    store.add("v_map.b", np.zeros(config.d_c))
    store.add("q_map.W", rng.derive("q_map").uniform(-r, r, (config.d_c, config.d_q)))
    store.add("q_map.b", np.zeros(config.d_c))
    store.add("classifier.W", rng.derive("classifier").uniform(-r, r, (config.answer_count, config.classifier_input)))
    store.add("classifier.b", np.zeros(config.answer_count))
    return store


def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Name -> shape of every parameter the variant owns."""
    return {name: tensor.shape for name, tensor in init_params(config, RngState(0)).values().items()}


# ---------------------------------------------------------------------------
# Pre-selection
# ---------------------------------------------------------------------------


def region_rows(block: RegionFeatureBlock) -> list[Tensor]:
    return [ops.take_row(block.features, i) for i in range(block.region_total)]


def preselect_weights(p: BiLstmParams, block: RegionFeatureBlock) -> Tensor:
    """Softmax over the 1-unit summed BiLSTM output of each region, in row-major order."""
    if p.forward.hidden_size != 1:
        raise shape_mismatch("preselect_weights", (1,), (p.forward.hidden_size,))
    outputs = bilstm_forward(p, region_rows(block))
    return ops.softmax(ops.concat(outputs))


def apply_preselection(weights: Tensor, block: RegionFeatureBlock) -> RegionFeatureBlock:
    """Scale region row i by weights[i]."""
    if weights.shape != (block.region_total,):
        raise shape_mismatch("apply_preselection", weights.shape, (block.region_total,))
    scaled = ops.scale_rows(weights, block.features)
    return RegionFeatureBlock.model_construct(grid=block.grid, d_i=block.d_i, features=scaled)


def conv_preselect_weights(w: Tensor, b: Tensor, block: RegionFeatureBlock) -> Tensor:
    """Shared linear map per region (a 1x1 convolution) followed by softmax."""
    if w.shape != (1, block.d_i):
        raise shape_mismatch("conv_preselect_weights", w.shape, (1, block.d_i))
    scores = ops.linear(block.features, w, b)
    return ops.softmax(ops.reshape(scores, (block.region_total,)))


# ---------------------------------------------------------------------------
# Fusion heads
# ---------------------------------------------------------------------------


def map_regions(block: RegionFeatureBlock, params: Params, ctx: ForwardContext = EVAL) -> Tensor:
    """v_i = tanh(V f_i + b_v) for every region, as an N x d_C block."""
    return ctx.drop(ops.tanh_op(ops.linear(block.features, params["v_map.W"], params["v_map.b"])), "v_map")


def map_question(q: Tensor, params: Params, ctx: ForwardContext = EVAL) -> Tensor:
    """q' = tanh(Q q + b_q)."""
    return ctx.drop(ops.tanh_op(ops.linear(q, params["q_map.W"], params["q_map.b"])), "q_map")


def fuse_ewm_attention(
    q: Tensor, block: RegionFeatureBlock, params: Params, ctx: ForwardContext = EVAL
) -> tuple[Tensor, Tensor]:
    """
    Element-wise-multiplication attention.

    fused_i = v_i * q' per region, then a column-wise max over regions. The map
    gives, per region, the fraction of the d_C columns that region won.
    """
    v = map_regions(block, params, ctx)
    q_mapped = map_question(q, params, ctx)
    fused_rows = ops.ewmul(v, ops.tile_rows(q_mapped, block.region_total))
    pooled, winners = ops.max_pool_rows(fused_rows)
    counts = np.bincount(np.asarray(winners, dtype=np.int64), minlength=block.region_total)
    attention = Tensor.wrap(counts.astype(np.float64) / len(winners))
    return pooled, attention


def fuse_traditional_attention(
    q: Tensor, block: RegionFeatureBlock, params: Params, ctx: ForwardContext = EVAL
) -> tuple[Tensor, Tensor]:
    """Scores s_i = <v_i, q'>, alpha = softmax(s), output concat(sum_i alpha_i v_i, q')."""
    v = map_regions(block, params, ctx)
    q_mapped = map_question(q, params, ctx)
    alpha = ops.softmax(ops.matmul(v, q_mapped))
    attended = ops.matmul(ops.transpose(v), alpha)
    return ops.concat([attended, q_mapped]), alpha


def fuse_holistic(q: Tensor, block: RegionFeatureBlock, params: Params, ctx: ForwardContext = EVAL) -> Tensor:
    """Mean region feature as the whole-image feature, mapped and fused element-wise with q'."""
    holistic = ops.mean_rows(block.features)
    v = ctx.drop(ops.tanh_op(ops.linear(holistic, params["v_map.W"], params["v_map.b"])), "v_map")
    return ops.ewmul(v, map_question(q, params, ctx))


def classify(fused: Tensor, params: Params) -> Tensor:
    """Affine map to answer logits; softmax is applied by the loss or at prediction."""
    w = params["classifier.W"]
    if fused.shape != (w.shape[1],):
        raise shape_mismatch("classify", fused.shape, (w.shape[1],))
    return ops.linear(fused, w, params["classifier.b"])


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


def encode_question(config: ModelConfig, params: Params, tokens: tuple[int, ...] | list[int]) -> Tensor:
    table = params[EMBEDDING]
    embeddings = [ops.take_row(table, t) for t in tokens]
    layers = [LstmCellParams.from_params(params, question_prefix(i)) for i in range(config.layers)]
    return question_final_encoding(layers, embeddings)


def forward(
    config: ModelConfig,
    params: Params,
    sample: VqaSample,
    mode: Mode = Mode.EVAL,
    rng: RngState | None = None,
) -> ForwardTrace:
    """Dispatch one sample through the configured variant."""
    ctx = ForwardContext(mode=mode, rate=config.dropout_rate, rng=rng)
    block = sample.features
    if block.d_i != config.d_i:
        raise shape_mismatch("forward(features)", (block.region_total, config.d_i), block.features.shape)
    q = encode_question(config, params, sample.question)
    uniform = Tensor.wrap(np.full(block.region_total, 1.0 / block.region_total))

    variant = Variant(config.variant)
    if variant is Variant.SALATT:
        weights = preselect_weights(BiLstmParams.from_params(params, PRESELECT), block)
        fused, attention = fuse_ewm_attention(q, apply_preselection(weights, block), params, ctx)
        return ForwardTrace(classify(ctx.drop(fused, "fused"), params), attention, weights)
    if variant is Variant.CONATT:
        weights = conv_preselect_weights(params[f"{CONV}.W"], params[f"{CONV}.b"], block)
        fused, attention = fuse_ewm_attention(q, apply_preselection(weights, block), params, ctx)
        return ForwardTrace(classify(ctx.drop(fused, "fused"), params), attention, weights)
    if variant is Variant.REGATT:
        fused, attention = fuse_ewm_attention(q, block, params, ctx)
        return ForwardTrace(classify(ctx.drop(fused, "fused"), params), attention)
    if variant is Variant.TRAATT:
        fused, alpha = fuse_traditional_attention(q, block, params, ctx)
        return ForwardTrace(classify(ctx.drop(fused, "fused"), params), alpha)
    if variant is Variant.HOLISTIC:
        fused = fuse_holistic(q, block, params, ctx)
        return ForwardTrace(classify(ctx.drop(fused, "fused"), params), uniform)
    raise ConfigError(f"unknown variant: {config.variant}")


def predict(trace: ForwardTrace) -> int:
    """Arg-max class; ties go to the lowest index."""
    return int(np.argmax(trace.logits.data))
