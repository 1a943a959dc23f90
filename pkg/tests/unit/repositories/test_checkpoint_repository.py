from pathlib import Path

import numpy as np
import pytest

from salatt.core.exceptions import ConfigError, FormatError
from salatt.core.rng import RngState
from salatt.models.vqa_model import init_params
from salatt.repositories.checkpoint_repository import CHECKPOINT_MAGIC, CheckpointRepository


class TestCheckpointRepository:
    @pytest.fixture
    def repo(self) -> CheckpointRepository:
        return CheckpointRepository()

    def test_save_then_load_is_bit_identical(self, repo, small_config, tmp_path: Path):
        # Arrange
        store = init_params(small_config, RngState(11))
        path = tmp_path / "best.ckpt"

        # Act
        repo.save(path, store.snapshot())
        loaded = repo.load(path)

        # Assert
        assert sorted(loaded) == sorted(store.names())
        for name, value in store.snapshot().items():
            assert loaded[name].tobytes() == value.tobytes()

    def test_tensors_are_written_in_sorted_order(self, repo, tmp_path: Path):
        path = tmp_path / "ordered.ckpt"

        repo.save(path, {"beta": np.zeros(1), "alpha": np.ones((2, 1))})
        raw = path.read_bytes()

        assert raw.startswith(CHECKPOINT_MAGIC)
        assert raw.index(b"alpha") < raw.index(b"beta")

    def test_restore_names_expected_and_found_shapes(self, repo, small_config, tmp_path: Path):
        # Arrange
        path = tmp_path / "best.ckpt"
        repo.save(path, init_params(small_config, RngState(0)).snapshot())
        wider = init_params(small_config.model_copy(update={"d_c": 7}), RngState(0))

        # Act & Assert
        with pytest.raises(ConfigError) as exc_info:
            repo.restore(path, wider)

        assert "(7, 8)" in exc_info.value.detail
        assert "(6, 8)" in exc_info.value.detail

    def test_restore_rejects_missing_tensors(self, repo, small_config, tmp_path: Path):
        path = tmp_path / "partial.ckpt"
        repo.save(path, {"embedding": np.zeros((11, 4))})

        with pytest.raises(ConfigError):
            repo.restore(path, init_params(small_config, RngState(0)))

    def test_truncated_checkpoint(self, repo, tmp_path: Path):
        path = tmp_path / "cut.ckpt"
        repo.save(path, {"w": np.ones(4)})
        path.write_bytes(path.read_bytes()[:-3])

        with pytest.raises(FormatError):
            repo.load(path)
