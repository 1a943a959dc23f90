from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from salatt.commands import COMMANDS
from salatt.config import settings
from salatt.core.structlog_config import clear_run_context, get_logger, setup_logging
from salatt.handlers.error_handlers import handle_command_error

log = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salatt",
        description="Saliency pre-selection + element-wise attention VQA at desk scale.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("--log-level", default=None, help="overrides SALATT_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="<command>")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    # Initialize logging system BEFORE any command runs
    setup_logging(args.log_level)
    try:
        return int(args.handler(args))
    except KeyboardInterrupt:
        print("error: interrupted", file=sys.stderr)
        return 130
    except Exception as exc:
        return handle_command_error(exc)
    finally:
        clear_run_context()


if __name__ == "__main__":
    sys.exit(main())
