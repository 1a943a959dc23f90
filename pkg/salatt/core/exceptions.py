"""Domain exceptions. Each carries a human-readable detail and a CLI exit code."""

from __future__ import annotations

from typing import Any


class SalAttError(Exception):
    exit_code: int = 1
    error_type: str = "salatt_error"

    def __init__(self, detail: str, **context: Any) -> None:
        super().__init__(detail)
        self.detail = detail
        self.context = context


class DimensionError(SalAttError, ValueError):
    error_type = "dimension_error"


class ArgumentError(SalAttError, ValueError):
    error_type = "argument_error"


class FormatError(SalAttError):
    error_type = "format_error"

    def __init__(self, detail: str, offset: int, **context: Any) -> None:
        super().__init__(f"{detail} (at offset {offset})", offset=offset, **context)
        self.offset = offset


class ConfigError(SalAttError):
    exit_code = 2
    error_type = "config_error"


class EvaluationError(SalAttError, ArithmeticError):
    error_type = "evaluation_error"


def shape_mismatch(op: str, *shapes: tuple[int, ...]) -> DimensionError:
    """Build a DimensionError naming every offending shape."""
    rendered = " vs ".join(str(tuple(s)) for s in shapes)
    return DimensionError(f"{op}: incompatible shapes {rendered}", op=op, shapes=[list(s) for s in shapes])
