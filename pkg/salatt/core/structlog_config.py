"""
Structured logging configuration using structlog.

This module provides:
- Unified logging for all package components (tensor core, services, commands)
- Structured JSON logging when LOG_RENDER_JSON is set
- Colored console logging for development
- Automatic run_id and command injection via contextvars

All log output goes to standard error. Standard output carries only the
machine-readable results of a command, so that it stays byte-deterministic.
"""

from __future__ import annotations

import hashlib
import logging
import sys
from contextvars import ContextVar
from typing import TYPE_CHECKING

import structlog

if TYPE_CHECKING:
    from structlog.typing import EventDict, Processor, WrappedLogger

from salatt.config import settings

# Context variables for the current CLI run
run_id_ctx: ContextVar[str | None] = ContextVar("run_id", default=None)
command_ctx: ContextVar[str | None] = ContextVar("command", default=None)


def make_run_id(command: str, seed: int) -> str:
    """Derive a stable run identifier from the command name and seed."""
    return hashlib.sha1(f"{command}:{seed}".encode()).hexdigest()[:12]


def get_run_id() -> str | None:
    """Get the current run ID from context."""
    return run_id_ctx.get()


def bind_run_context(command: str, seed: int) -> str:
    """Bind run_id and command for every log line emitted by this run."""
    run_id = make_run_id(command, seed)
    run_id_ctx.set(run_id)
    command_ctx.set(command)
    return run_id


def clear_run_context() -> None:
    """Clear the run context."""
    run_id_ctx.set(None)
    command_ctx.set(None)


def add_run_context(logger: WrappedLogger, method_name: str, event_dict: EventDict) -> EventDict:
    """
    Processor that adds run_id and command to every log entry.

    These values are populated by bind_run_context() when a command starts.
    """
    run_id = run_id_ctx.get()
    command = command_ctx.get()

    if run_id:
        event_dict["run_id"] = run_id
    if command:
        event_dict["command"] = command

    return event_dict


def inject_app_context(logger: WrappedLogger, method_name: str, event_dict: EventDict) -> EventDict:
    """
    Inject static application context so that every log line has standard fields
    for indexing (app_name, app_version, environment).
    """
    event_dict["app_name"] = settings.APP_NAME
    event_dict["app_version"] = settings.APP_VERSION
    event_dict["environment"] = settings.ENVIRONMENT
    return event_dict


def setup_logging(level: str | None = None) -> None:
    """
    Initialize the logging system with structlog.

    Call once at process startup, before any command runs.

    The configuration:
    - Development: Colored console output with human-readable format
    - LOG_RENDER_JSON: JSON Lines format

    Args:
        level: Optional level override (e.g. from --log-level); defaults to settings.LOG_LEVEL.
    """
    log_level = (level or settings.LOG_LEVEL).upper()
    numeric_level = getattr(logging, log_level, logging.INFO)

    # Shared processors for both structlog and stdlib logging
    shared_processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.PositionalArgumentsFormatter(),
        inject_app_context,
        add_run_context,
        structlog.stdlib.ExtraAdder(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
    ]

    if settings.LOG_RENDER_JSON:
        shared_processors.append(structlog.processors.format_exc_info)
        renderer: Processor = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(
            colors=sys.stderr.isatty(),
            exception_formatter=structlog.dev.plain_traceback,
        )

    structlog.configure(
        processors=[
            *shared_processors,
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            renderer,
        ],
    )

    # Diagnostics go to stderr; stdout belongs to command output
    root_handler = logging.StreamHandler(sys.stderr)
    root_handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.addHandler(root_handler)
    root_logger.setLevel(numeric_level)

    _configure_library_loggers()

    log = structlog.get_logger("salatt.core.structlog_config")
    log.debug(
        "Logging system initialized",
        log_level=log_level,
        json_format=settings.LOG_RENDER_JSON,
        environment=settings.ENVIRONMENT,
    )


def _configure_library_loggers() -> None:
    """Reduce noise from library and warnings loggers."""
    logging.captureWarnings(True)

    # Logger configurations: (name, level, propagate)
    logger_configs = [
        ("py.warnings", logging.WARNING, True),
        ("numpy", logging.WARNING, True),
    ]

    for logger_name, level, propagate in logger_configs:
        lib_logger = logging.getLogger(logger_name)
        lib_logger.setLevel(level)
        lib_logger.propagate = propagate
        lib_logger.handlers.clear()


def get_logger(name: str | None = None) -> structlog.stdlib.BoundLogger:
    """
    Get a structlog logger instance.

    Args:
        name: Logger name (typically __name__).

    Returns:
        A bound structlog logger.

    Example:
        log = get_logger(__name__)
        log.info("Checkpoint written", path="runs/best.ckpt")
    """
    return structlog.get_logger(name)


__all__ = [
    "bind_run_context",
    "clear_run_context",
    "get_logger",
    "get_run_id",
    "make_run_id",
    "setup_logging",
]
