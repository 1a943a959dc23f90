"""
Run configuration: flat key=value settings for every CLI command.

Precedence: field defaults < profile < config file < command-line overrides.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from salatt.core.exceptions import ConfigError
from salatt.models.enums import Profile, Variant
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.region import RegionGrid
from salatt.schemas.toy_task import ToyTaskSpec


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    # Model
    variant: Variant = Variant.SALATT
    d_i: int = Field(default=32, gt=0)
    embed_dim: int = Field(default=8, gt=0)
    layers: int = Field(default=1, gt=0)
    hidden: int = Field(default=16, gt=0)
    d_c: int = Field(default=32, gt=0)
    vocab_size: int = Field(default=16, gt=0)
    answer_count: int = Field(default=16, gt=0)
    dropout_rate: float = Field(default=0.1, ge=0.0, lt=1.0)
    init_range: float = Field(default=0.08, gt=0.0)
    grid_g: int = Field(default=4, ge=1)
    grid_m: int = Field(default=2, ge=1)
    grid_s: int = Field(default=1, ge=1)
    normalize_features: bool = False

    # Optimizer and schedule
    lr: float = Field(default=2e-3, ge=0.0)
    rms_decay: float = Field(default=0.95, ge=0.0, lt=1.0)
    rms_epsilon: float = Field(default=1e-8, gt=0.0)
    batch_size: int = Field(default=32, gt=0)
    eval_every: int = Field(default=100, gt=0)
    patience: int = Field(default=500, ge=0)
    max_iterations: int = Field(default=2000, ge=0)
    seed: int = 42

    # Paths
    features_path: Path = Path("data/features.bin")
    train_path: Path = Path("data/train.jsonl")
    val_path: Path = Path("data/val.jsonl")
    checkpoint_path: Path = Path("runs/best.ckpt")
    metrics_path: Path = Path("runs/metrics.csv")
    output_dir: Path = Path("data")

    # Toy task generation
    toy_patterns: int = 4
    toy_questions: int = 2
    toy_noise: float = 0.5
    toy_train_size: int = 2000
    toy_val_size: int = 200

    @property
    def grid(self) -> RegionGrid:
        return RegionGrid(g=self.grid_g, m=self.grid_m, s=self.grid_s)

    def model_settings(self, variant: Variant | None = None) -> ModelConfig:
        return ModelConfig(
            variant=variant or self.variant,
            d_i=self.d_i,
            embed_dim=self.embed_dim,
            layers=self.layers,
            hidden=self.hidden,
            d_c=self.d_c,
            vocab_size=self.vocab_size,
            answer_count=self.answer_count,
            dropout_rate=self.dropout_rate,
            grid=self.grid,
            init_range=self.init_range,
        )

    def toy_spec(self) -> ToyTaskSpec:
        return ToyTaskSpec(
            patterns=self.toy_patterns,
            questions=self.toy_questions,
            noise=self.toy_noise,
            d_i=self.d_i,
            grid=self.grid,
            train_size=self.toy_train_size,
            val_size=self.toy_val_size,
        )

    def require_paths(self, *keys: str) -> None:
        """Raise ConfigError unless every named input path exists."""
        for key in keys:
            path = getattr(self, key)
            if not Path(path).exists():
                raise ConfigError(f"{key} does not exist: {path}", key=key)


PROFILES: dict[Profile, dict[str, Any]] = {
    Profile.TOY: {},
    Profile.FULL: {
        "d_i": 2048,
        "embed_dim": 200,
        "layers": 2,
        "hidden": 512,
        "d_c": 1024,
        "vocab_size": 15000,
        "answer_count": 1000,
        "dropout_rate": 0.5,
        "lr": 3e-4,
        "batch_size": 500,
        "eval_every": 1000,
        "patience": 5000,
        "max_iterations": 200000,
    },
    Profile.GRADCHECK: {
        "d_i": 8,
        "embed_dim": 4,
        "layers": 1,
        "hidden": 5,
        "d_c": 6,
        "vocab_size": 11,
        "answer_count": 4,
        "dropout_rate": 0.0,
        "init_range": 0.3,
    },
}


def parse_key_values(lines: list[str], source: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    values: dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_run_config(
    config_file: Path | None = None,
    overrides: dict[str, Any] | None = None,
    profile: Profile = Profile.TOY,
) -> RunConfig:
    """Merge profile defaults, an optional key=value file and overrides into a validated RunConfig."""
    merged: dict[str, Any] = dict(PROFILES[profile])
    if config_file is not None:
        if not config_file.exists():
            raise ConfigError(f"config file does not exist: {config_file}")
        merged.update(parse_key_values(config_file.read_text(encoding="utf-8").splitlines(), str(config_file)))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(merged) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}", keys=unknown)
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first.get("loc", ())) or "__root__"
        raise ConfigError(f"invalid value for {field}: {first.get('msg', 'validation error')}") from exc
