"""
Command-level exception handlers.

Provides:
- One single-line diagnostic on stderr per failure (``error: <detail>``)
- Structured logging with the bound run context
- A stable mapping from exception type to process exit code
"""

from __future__ import annotations

import sys
from collections.abc import Callable
from typing import TextIO, cast

from pydantic import ValidationError

from salatt.config import settings
from salatt.core.exceptions import SalAttError
from salatt.core.structlog_config import get_logger

log = get_logger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2

Handler = Callable[[BaseException], tuple[int, str]]


def salatt_error_handler(exc: BaseException) -> tuple[int, str]:
    """Handle domain errors raised intentionally within the package."""
    error = cast(SalAttError, exc)
    log.warning("Command failed", error_type=error.error_type, detail=error.detail, **error.context)
    return error.exit_code, error.detail


def validation_error_handler(exc: BaseException) -> tuple[int, str]:
    """Handle pydantic validation errors that escaped a schema boundary."""
    validation_error = cast(ValidationError, exc)
    errors = validation_error.errors()
    first = errors[0] if errors else {}
    field = ".".join(str(p) for p in first.get("loc", ())) or "__root__"
    message = first.get("msg", "validation error")
    log.warning("Validation error", error_count=len(errors), errors=[dict(e) for e in errors[:5]])
    return EXIT_USAGE, f"invalid value for {field}: {message}"


def os_error_handler(exc: BaseException) -> tuple[int, str]:
    os_error = cast(OSError, exc)
    log.warning("I/O error", filename=os_error.filename, errno=os_error.errno)
    where = f": {os_error.filename}" if os_error.filename else ""
    return EXIT_FAILURE, f"I/O error{where}: {os_error.strerror or os_error}"


def unhandled_exception_handler(exc: BaseException) -> tuple[int, str]:
    """Handle uncaught exceptions; details only surface when SALATT_DEBUG is set."""
    log.exception("Unhandled exception", exception_type=type(exc).__name__, exc_info=exc)
    detail = f"{type(exc).__name__}: {exc}" if settings.DEBUG else "an internal error occurred"
    return EXIT_FAILURE, detail


# Most specific first; the general handler goes last
EXCEPTION_HANDLERS: list[tuple[type[BaseException], Handler]] = [
    (SalAttError, salatt_error_handler),
    (ValidationError, validation_error_handler),
    (OSError, os_error_handler),
    (Exception, unhandled_exception_handler),
]


def handle_command_error(exc: BaseException, stream: TextIO | None = None) -> int:
    """Write the single-line diagnostic for ``exc`` and return the process exit code."""
    for exc_type, handler in EXCEPTION_HANDLERS:
        if isinstance(exc, exc_type):
            code, detail = handler(exc)
            break
    else:
        raise exc
    first_line = detail.splitlines()[0] if detail else type(exc).__name__
    print(f"error: {first_line}", file=stream or sys.stderr)
    return code
