from __future__ import annotations

import argparse
import contextlib

from salatt.commands.options import add_variant_option, emit
from salatt.core.exceptions import EvaluationError
from salatt.core.structlog_config import bind_run_context, get_logger
from salatt.core.tensor import inject_backward_fault
from salatt.models.enums import Profile, Variant
from salatt.schemas.run_config import load_run_config
from salatt.services.gradcheck_service import DEFAULT_TOLERANCE, GradCheckService

log = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gradcheck", help="finite-difference check of every parameter block")
    add_variant_option(parser, allow_all=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    parser.add_argument("--samples", type=int, default=2)
    # Negative control: scales the backward pass of one op
    parser.add_argument("--inject-fault", metavar="OP", default=None, help=argparse.SUPPRESS)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    bind_run_context("gradcheck", args.seed)
    base = load_run_config(profile=Profile.GRADCHECK).model_settings()
    variants = list(Variant) if args.variant == "all" else [Variant(args.variant)]
    service = GradCheckService(base, seed=args.seed, sample_count=args.samples)

    fault = inject_backward_fault(args.inject_fault) if args.inject_fault else contextlib.nullcontext()
    with fault:
        results = service.check(variants)

    failed = [r for r in results if not r.passed(args.tolerance)]
    for r in results:
        status = "ok" if r.passed(args.tolerance) else "FAIL"
        print(f"{r.variant.value} {r.block} max_rel_err={r.max_relative_error:.3e} {status}")
    emit("blocks", len(results))
    emit("worst", max((r.max_relative_error for r in results), default=0.0))
    emit("failed", len(failed))
    if failed:
        worst = max(failed, key=lambda r: r.max_relative_error)
        raise EvaluationError(
            f"{len(failed)} parameter blocks exceed tolerance {args.tolerance:g}; worst {worst.variant.value} "
            f"{worst.block} at {worst.max_relative_error:.3e}"
        )
    return 0
