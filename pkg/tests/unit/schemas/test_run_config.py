from pathlib import Path

import pytest

from salatt.core.exceptions import ConfigError
from salatt.models.enums import Profile, Variant
from salatt.schemas.run_config import RunConfig, load_run_config, parse_key_values


class TestParseKeyValues:
    def test_comments_and_blank_lines_are_skipped(self):
        values = parse_key_values(["# model", "", "variant = RegAtt  # trailing", "d_c=12"], "cfg")

        assert values == {"variant": "RegAtt", "d_c": "12"}

    def test_line_without_equals_is_rejected(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_key_values(["variant RegAtt"], "cfg")

        assert "cfg:1" in exc_info.value.detail


class TestLoadRunConfig:
    def test_toy_defaults(self):
        config = load_run_config()

        assert config.variant is Variant.SALATT
        assert config.grid.n == 3
        assert config.max_iterations == 2000
        assert config.batch_size == 32

    def test_full_scale_profile_dimensions(self):
        config = load_run_config(profile=Profile.FULL)

        assert (config.embed_dim, config.layers, config.hidden, config.d_c) == (200, 2, 512, 1024)
        assert config.lr == pytest.approx(3e-4)

    def test_precedence_file_then_overrides(self, tmp_path: Path):
        # Arrange
        cfg = tmp_path / "run.cfg"
        cfg.write_text("d_c=12\nhidden=7\n", encoding="utf-8")

        # Act
        config = load_run_config(cfg, {"hidden": "9"}, Profile.FULL)

        # Assert
        assert config.d_c == 12
        assert config.hidden == 9
        assert config.embed_dim == 200

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(overrides={"hiden": 3})

        assert "hiden" in exc_info.value.detail
        assert exc_info.value.exit_code == 2

    def test_invalid_value_is_a_config_error(self):
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(overrides={"dropout_rate": "1.5"})

        assert "dropout_rate" in exc_info.value.detail

    def test_unknown_variant_is_rejected(self):
        with pytest.raises(ConfigError):
            load_run_config(overrides={"variant": "salatt"})

    def test_missing_config_file(self, tmp_path: Path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.cfg")

    def test_require_paths_names_the_key(self, tmp_path: Path):
        config = RunConfig(features_path=tmp_path / "none.bin")

        with pytest.raises(ConfigError) as exc_info:
            config.require_paths("features_path")

        assert "features_path" in exc_info.value.detail

    def test_model_settings_carry_variant_and_grid(self):
        model = load_run_config(overrides={"grid_g": 5, "grid_m": 3, "grid_s": 2}).model_settings(Variant.TRAATT)

        assert model.variant is Variant.TRAATT
        assert model.grid.n == 2
        assert model.classifier_input == 2 * model.d_c
