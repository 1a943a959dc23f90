"""Flags shared by several subcommands and their translation into RunConfig overrides."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from salatt.core.exceptions import ConfigError
from salatt.models.enums import Profile, Variant
from salatt.schemas.run_config import RunConfig, load_run_config

VARIANT_NAMES = [v.value for v in Variant]


def add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key=value configuration file")
    parser.add_argument(
        "--set",
        dest="assignments",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )


def add_variant_option(parser: argparse.ArgumentParser, *, allow_all: bool = False) -> None:
    choices = [*VARIANT_NAMES, "all"] if allow_all else VARIANT_NAMES
    parser.add_argument("--variant", choices=choices, default="all" if allow_all else None)


def parse_assignments(assignments: list[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for item in assignments:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    return values


def add_profile_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--profile",
        choices=[Profile.TOY.value, Profile.FULL.value],
        default=Profile.TOY.value,
        help="preset the remaining keys are layered on",
    )


def resolve_config(args: argparse.Namespace, flags: dict[str, Any], profile: Profile | None = None) -> RunConfig:
    """
    Dedicated flags win over --set, which wins over the config file and the profile.

    The profile is ``profile`` when given, else the parsed --profile, else toy.
    """
    if profile is None:
        profile = Profile(getattr(args, "profile", None) or Profile.TOY.value)
    overrides: dict[str, Any] = parse_assignments(getattr(args, "assignments", []))
    overrides.update({key: value for key, value in flags.items() if value is not None})
    return load_run_config(getattr(args, "config", None), overrides, profile)


def emit(key: str, value: Any) -> None:
    """One machine-readable ``key=value`` line on stdout; floats keep full precision."""
    rendered = repr(value) if isinstance(value, float) else str(value)
    print(f"{key}={rendered}")


def add_data_dir_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-dir",
        type=Path,
        default=None,
        help="directory written by gen-toy; sets features_path, train_path and val_path",
    )


def data_dir_flags(args: argparse.Namespace) -> dict[str, Any]:
    data_dir: Path | None = getattr(args, "data_dir", None)
    if data_dir is None:
        return {}
    return {
        "features_path": data_dir / "features.bin",
        "train_path": data_dir / "train.jsonl",
        "val_path": data_dir / "val.jsonl",
    }
