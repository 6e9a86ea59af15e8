"""``netbell verify``: run the acceptance criteria and report pass/fail.

Each criterion is a validator; the report lists its checks, its run time,
and a closing summary. The exit code is 2 when any criterion fails.
"""

import argparse
import contextlib
import logging

from ..simulators.channels import fault_injection
from ..utils import worker_count
from ..validators.acceptance import CRITERIA, FAULT_TARGETS
from ..validators.base_validator import ValidationLevel, ValidationResult
from .run_options import EXIT_ACCEPTANCE, EXIT_INVALID, EXIT_OK

logger = logging.getLogger(__name__)


class AcceptanceRunner:
    """Runs the selected criteria and prints the verification report."""

    def __init__(
        self,
        criteria: list[int] | None = None,
        quick: bool = False,
        seed: int = 0,
        workers: int = 1,
        verbose: bool = False,
    ):
        """Initialize the runner.

        Args:
            criteria: Criterion ids to run; all of them when empty
            quick: Reduced state counts, grids and restarts
            seed: Base seed of every reproduction
            workers: Worker processes for restarts and scan points
            verbose: Print passing checks as well as failing ones
        """
        self.criteria = sorted(set(criteria)) if criteria else sorted(CRITERIA)
        self.quick = quick
        self.seed = seed
        self.workers = workers
        self.verbose = verbose
        self.results: dict[int, ValidationResult] = {}

    def run_all(self) -> bool:
        """Run every selected criterion; ``True`` when all pass."""
        mode = "quick" if self.quick else "full"
        count = len(self.criteria)
        print(f"🔍 Verifying {count} criteria ({mode}, seed {self.seed})")
        print()

        all_passed = True
        for criterion_id in self.criteria:
            criterion = CRITERIA[criterion_id](self.quick, self.seed, self.workers)
            try:
                result = criterion.validate()
            except Exception as e:
                logger.exception("criterion %d raised", criterion_id)
                print(f"❌ FAILED  {criterion_id}. {criterion.title}")
                print(f"   ❌ ERROR: {type(e).__name__}: {e}")
                all_passed = False
                continue

            self.results[criterion_id] = result
            status = "❌ FAILED" if result.has_errors else "✅ PASSED"
            all_passed = all_passed and not result.has_errors
            seconds = result.metadata.get("seconds", 0.0)
            print(f"{status}  {result.validator_name} ({seconds:.1f}s)")
            self._print_checks(result)
        return all_passed

    def _print_checks(self, result: ValidationResult) -> None:
        for issue in result.errors:
            failed = issue.level is ValidationLevel.ERROR
            if not (failed or self.verbose):
                continue
            icon = "❌" if failed else "✅"
            print(f"   {icon} {issue.message}")
            if issue.context:
                print(f"      📝 {issue.context}")

    def print_summary(self) -> None:
        """Print the failing criterion ids and the total run time."""
        failed = [i for i in self.criteria if i not in self.results]
        failed += [i for i, r in self.results.items() if r.has_errors]
        seconds = sum(r.metadata.get("seconds", 0.0) for r in self.results.values())
        print()
        if failed:
            ids = ", ".join(str(i) for i in sorted(failed))
            print(f"❌ Verification failed: criteria {ids}")
        else:
            print(f"✅ All {len(self.criteria)} criteria passed")
        print(f"   total time {seconds:.1f}s")


def cmd_verify(
    criteria: list[int] | None = None,
    quick: bool = False,
    seed: int = 0,
    workers: int | None = None,
    inject_fault: int | None = None,
    verbose: bool = False,
) -> int:
    """Run the acceptance suite; exit code 2 on any failure."""
    unknown = [i for i in criteria or [] if i not in CRITERIA]
    if unknown:
        available = ", ".join(str(i) for i in CRITERIA)
        print(f"❌ Unknown criteria {unknown}; available: {available}")
        return EXIT_INVALID

    fault: contextlib.AbstractContextManager = contextlib.nullcontext()
    if inject_fault is not None:
        if inject_fault not in FAULT_TARGETS:
            available = ", ".join(str(i) for i in FAULT_TARGETS)
            print(f"❌ No fault for criterion {inject_fault}; available: {available}")
            return EXIT_INVALID
        channel = FAULT_TARGETS[inject_fault]
        print(f"⚠️  Injected fault: {channel} channel built at half strength")
        fault = fault_injection(channel)
        # worker processes would rebuild the pristine channel library
        workers = 1

    runner = AcceptanceRunner(criteria, quick, seed, worker_count(workers), verbose)
    with fault:
        passed = runner.run_all()
    runner.print_summary()
    return EXIT_OK if passed else EXIT_ACCEPTANCE


def _criteria(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated criterion ids, got {text!r}"
        ) from e


def add_parser(subparsers) -> argparse.ArgumentParser:
    """Register the ``verify`` subcommand."""
    parser = subparsers.add_parser(
        "verify",
        help="Run the acceptance criteria",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s                          # Every criterion, full size
  %(prog)s --quick                  # Reduced sizes, same thresholds
  %(prog)s --criteria 1,2,9         # A subset
  %(prog)s --inject-fault 5 --criteria 5   # Must fail criterion 5
        """,
    )
    parser.add_argument(
        "--criteria", type=_criteria, help="Comma-separated criterion ids"
    )
    parser.add_argument(
        "--quick", action="store_true", help="Reduce state counts and grids"
    )
    parser.add_argument("--seed", type=int, default=0, help="Base seed")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument(
        "--inject-fault",
        type=int,
        metavar="CRITERION",
        help="Corrupt the channel that CRITERION checks",
    )
    parser.add_argument(
        "--show-passing", action="store_true", help="List passing checks too"
    )
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> int:
    """Entry point of the ``verify`` subcommand."""
    return cmd_verify(
        args.criteria,
        args.quick,
        args.seed,
        args.workers,
        args.inject_fault,
        args.show_passing,
    )
