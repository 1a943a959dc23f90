from __future__ import annotations

import time
from collections.abc import Callable, Sequence

from salatt.core import ops
from salatt.core.exceptions import ArgumentError
from salatt.core.optim import ParamStore, rmsprop_step
from salatt.core.rng import RngState
from salatt.core.structlog_config import get_logger
from salatt.core.tensor import Tape, Tensor
from salatt.models.enums import Mode
from salatt.models.vqa_model import forward
from salatt.schemas.dataset import VqaSample
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.run_config import RunConfig
from salatt.schemas.training import EvaluationRecord, EvaluationReport, TrainState

log = get_logger(__name__)

Evaluator = Callable[[dict[str, Tensor], Sequence[VqaSample]], EvaluationReport]


def sample_batch(dataset: Sequence[VqaSample], batch_size: int, rng: RngState) -> list[VqaSample]:
    """Uniform sampling with replacement."""
    if not dataset:
        raise ArgumentError("cannot sample a batch from an empty dataset")
    if batch_size < 1:
        raise ArgumentError(f"batch size must be positive, got {batch_size}")
    return [dataset[int(i)] for i in rng.integers(len(dataset), batch_size)]


def batch_loss(
    config: ModelConfig,
    params: dict[str, Tensor],
    batch: Sequence[VqaSample],
    mode: Mode = Mode.TRAIN,
    rng: RngState | None = None,
) -> Tensor:
    """Mean cross-entropy over the batch as a scalar tensor."""
    if not batch:
        raise ArgumentError("empty training batch")
    total: Tensor | None = None
    for index, sample in enumerate(batch):
        if sample.answer_label is None:
            raise ArgumentError(f"batch sample {index} has no in-vocabulary answer label")
        trace = forward(config, params, sample, mode=mode, rng=rng.derive(index) if rng is not None else None)
        loss = ops.cross_entropy(trace.logits, sample.answer_label)
        total = loss if total is None else ops.add(total, loss)
    assert total is not None
    return ops.scale(total, 1.0 / len(batch))


def train_step(
    config: ModelConfig,
    store: ParamStore,
    batch: Sequence[VqaSample],
    lr: float,
    decay: float,
    epsilon: float,
    rng: RngState | None = None,
) -> float:
    """Forward, mean loss, backward and one RMSprop update; returns the pre-update loss."""
    params = store.values()
    with Tape() as tape:
        loss = batch_loss(config, params, batch, Mode.TRAIN, rng)
    tape.backward(loss)
    store.accumulate_gradients(tape, params)
    rmsprop_step(store, lr=lr, decay=decay, epsilon=epsilon)
    return loss.item()


class TrainingService:
    def __init__(
        self,
        config: ModelConfig,
        store: ParamStore,
        settings: RunConfig,
        evaluator: Evaluator,
    ) -> None:
        """Service is constructed with the model, its parameters, the run settings and a validation evaluator.

        Contract:
        - inputs: labeled training samples, validation samples
        - outputs: TrainState holding the best snapshot and the evaluation history
        - error modes: ArgumentError when no training sample carries a label
        """
        self.config = config
        self.store = store
        self.settings = settings
        self.evaluator = evaluator
        self.rng = RngState(settings.seed).derive("train", config.variant.value)

    def _evaluate(self, state: TrainState, iteration: int, train_loss: float, val: Sequence[VqaSample], start: float) -> None:
        report = self.evaluator(self.store.values(), val)
        entry = EvaluationRecord(
            iteration=iteration,
            train_loss=train_loss,
            val_vqa_acc=report.vqa_accuracy,
            val_top1=report.top1_accuracy,
            seconds=time.perf_counter() - start,
        )
        improved = state.record(entry, self.store.snapshot())
        log.info(
            "Evaluation",
            iteration=iteration,
            train_loss=round(train_loss, 6),
            val_vqa_acc=round(report.vqa_accuracy, 6),
            val_top1=round(report.top1_accuracy, 6),
            best=round(state.best_val_accuracy, 6),
            improved=improved,
        )

    def train_with_early_stopping(self, train: Sequence[VqaSample], val: Sequence[VqaSample]) -> TrainState:
        """
        Train until max_iterations, evaluating every eval_every iterations.

        Every evaluation after iteration 0 stops training once
        ``iteration - best_iteration >= patience``. With patience 0 that is the
        first evaluation after iteration 0, whether or not it improved.
        """
        labeled = [s for s in train if s.answer_label is not None]
        skipped = len(train) - len(labeled)
        if skipped:
            log.warning("Skipping training samples with out-of-vocabulary answers", skipped=skipped)
        if not labeled:
            raise ArgumentError("no training sample has an in-vocabulary answer")

        s = self.settings
        state = TrainState()
        start = time.perf_counter()
        batch_rng = self.rng.derive("batches")
        dropout_rng = self.rng.derive("dropout")

        # Loss of a fixed reference batch stands in for the train loss before any update
        reference = labeled[: min(s.batch_size, len(labeled))]
        pending: list[float] = [batch_loss(self.config, self.store.values(), reference, Mode.EVAL).item()]
        iteration = 0
        log.info(
            "Training started",
            variant=self.config.variant.value,
            parameters=self.store.parameter_count(),
            train=len(labeled),
            val=len(val),
            max_iterations=s.max_iterations,
        )
        while True:
            if iteration % s.eval_every == 0 or iteration == s.max_iterations:
                self._evaluate(state, iteration, sum(pending) / len(pending), val, start)
                pending = []
                if iteration > 0 and iteration - state.best_iteration >= s.patience:
                    state.stopped_early = True
                    log.info("Early stopping", iteration=iteration, best_iteration=state.best_iteration)
                    break
            if iteration >= s.max_iterations:
                break
            batch = sample_batch(labeled, s.batch_size, batch_rng)
            loss = train_step(
                self.config,
                self.store,
                batch,
                lr=s.lr,
                decay=s.rms_decay,
                epsilon=s.rms_epsilon,
                rng=dropout_rng.derive(iteration),
            )
            pending.append(loss)
            iteration += 1

        state.iteration = iteration
        log.info(
            "Training finished",
            iterations=iteration,
            best_iteration=state.best_iteration,
            best_val_accuracy=round(state.best_val_accuracy, 6),
            stopped_early=state.stopped_early,
        )
        return state
