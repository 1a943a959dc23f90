from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from salatt.core.exceptions import ConfigError
from salatt.core.optim import ParamStore
from salatt.core.rng import RngState
from salatt.core.structlog_config import get_logger
from salatt.core.tensor import Tensor
from salatt.models.enums import Variant
from salatt.models.vqa_model import init_params
from salatt.repositories.checkpoint_repository import CheckpointRepository
from salatt.repositories.dataset_repository import DatasetRepository
from salatt.repositories.feature_repository import FeatureRepository
from salatt.schemas.dataset import AnswerVocab, VqaSample
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.region import RegionFeatureBlock
from salatt.schemas.run_config import RunConfig
from salatt.schemas.training import EvaluationReport, TrainState
from salatt.services.evaluation_service import EvaluationService, build_answer_vocab, label_samples
from salatt.services.region_service import normalize_block
from salatt.services.training_service import TrainingService

log = get_logger(__name__)


@dataclass(frozen=True)
class LoadedData:
    vocab: AnswerVocab
    train: list[VqaSample]
    val: list[VqaSample]


@dataclass(frozen=True)
class TrainOutcome:
    model: ModelConfig
    state: TrainState
    report: EvaluationReport


class ExperimentService:
    def __init__(
        self,
        features: FeatureRepository | None = None,
        datasets: DatasetRepository | None = None,
        checkpoints: CheckpointRepository | None = None,
    ) -> None:
        """Service is constructed with the repositories for features, datasets and checkpoints.

        Contract:
        - inputs: a validated RunConfig
        - outputs: labeled samples, trained parameters, evaluation reports
        - error modes: ConfigError for missing inputs or features that do not match the
          configured grid and d_I; FormatError from the repositories
        """
        self.features = features or FeatureRepository()
        self.datasets = datasets or DatasetRepository()
        self.checkpoints = checkpoints or CheckpointRepository()

    def load_blocks(self, settings: RunConfig) -> list[RegionFeatureBlock]:
        settings.require_paths("features_path")
        blocks = self.features.load_features(settings.features_path)
        if blocks:
            first = blocks[0]
            if first.grid != settings.grid or first.d_i != settings.d_i:
                raise ConfigError(
                    f"features_path holds grid g={first.grid.g} m={first.grid.m} s={first.grid.s} d_I={first.d_i}, "
                    f"configured g={settings.grid_g} m={settings.grid_m} s={settings.grid_s} d_I={settings.d_i}"
                )
        if settings.normalize_features:
            blocks = [normalize_block(b) for b in blocks]
        return blocks

    def answer_vocab(self, settings: RunConfig) -> AnswerVocab:
        """Rebuilt from the training answers on every run; checkpoints do not store it."""
        settings.require_paths("train_path")
        records = self.datasets.read_records(settings.train_path)
        return build_answer_vocab((r.answer for r in records), settings.answer_count)

    def load_split(self, settings: RunConfig, path: Path, blocks: list[RegionFeatureBlock], vocab: AnswerVocab) -> list[VqaSample]:
        if not Path(path).exists():
            raise ConfigError(f"dataset does not exist: {path}")
        samples = self.datasets.load_samples(path, blocks, vocab_size=settings.vocab_size)
        return label_samples(samples, vocab)

    def load_data(self, settings: RunConfig) -> LoadedData:
        settings.require_paths("features_path", "train_path", "val_path")
        blocks = self.load_blocks(settings)
        vocab = self.answer_vocab(settings)
        return LoadedData(
            vocab=vocab,
            train=self.load_split(settings, settings.train_path, blocks, vocab),
            val=self.load_split(settings, settings.val_path, blocks, vocab),
        )

    def init_store(self, settings: RunConfig, variant: Variant | None = None) -> tuple[ModelConfig, ParamStore]:
        model = settings.model_settings(variant)
        return model, init_params(model, RngState(settings.seed).derive("init", model.variant.value))

    def restore(self, settings: RunConfig, checkpoint: Path) -> tuple[ModelConfig, ParamStore]:
        if not Path(checkpoint).exists():
            raise ConfigError(f"checkpoint does not exist: {checkpoint}")
        model, store = self.init_store(settings)
        self.checkpoints.restore(checkpoint, store)
        return model, store

    def train(self, settings: RunConfig, data: LoadedData, variant: Variant | None = None) -> TrainOutcome:
        """Train one variant with early stopping and re-evaluate its best parameters on val."""
        model, store = self.init_store(settings, variant)
        evaluation = EvaluationService(data.vocab)

        def evaluator(params: dict[str, Tensor], samples: Sequence[VqaSample]) -> EvaluationReport:
            return evaluation.evaluate(model, params, samples)

        state = TrainingService(model, store, settings, evaluator).train_with_early_stopping(data.train, data.val)
        store.load(state.best_params)
        report = evaluation.evaluate(model, store.values(), data.val)
        return TrainOutcome(model=model, state=state, report=report)
