"""
Command-line front end.

    python -m src.cli solve FILE [--format json] [--cost-view]
    python -m src.cli best-response FILE --hider HIDER.json [--min]
    python -m src.cli verify FILE [FILE ...] [--epsilon E] [--oracle-only] [--workers N]
    python -m src.cli sample FILE [--seed S] [--count N]

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 unsupported,
4 resource limit.
"""

from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Sequence

from .best_response import ResponseProblem, index_order, index_values, response_payoff
from .core import sample_s_a_order
from .errors import (
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    InvalidArgumentError,
    NotIndexableError,
    RescueGameError,
    UnsupportedError,
)
from .indexable import AdditiveCost, TravelSearch, cost_paid_view, solve_closed_form, to_game
from .instance_file import dump_document, load_hider, load_instance
from .oracle import DEFAULT_EPSILON, verify
from .reports import generate_report
from .tree import RootedTree, sample_search, solve_tree
from .utils.logging_config import StructuredLogger

logger = StructuredLogger("rescue_games.cli")


def _epsilon(raw: str) -> Fraction:
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rescue-games",
        description="Exact solver for search-and-rescue games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Print the value and optimal strategies")
    solve.add_argument("file", help="Instance file (JSON)")
    solve.add_argument("--format", choices=["text", "json"], default="text")
    solve.add_argument(
        "--cost-view",
        action="store_true",
        help="Also print the expected total cost paid (additive / travel-search)",
    )

    best = sub.add_parser("best-response", help="Index-rule best response to a hider distribution")
    best.add_argument("file", help="Instance file with k = 1")
    best.add_argument("--hider", required=True, help='Hider file: {"hider": {id: "num/den"}}')
    best.add_argument("--min", action="store_true", help="Minimize instead of maximize")
    best.add_argument("--format", choices=["text", "json"], default="text")

    check = sub.add_parser("verify", help="Check closed-form solutions against the matrix oracle")
    check.add_argument("files", nargs="+", help="Instance files")
    check.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    check.add_argument("--oracle-only", action="store_true", help="Only solve the matrix game")
    check.add_argument("--method", choices=["lp", "fictitious-play"], default="lp")
    check.add_argument(
        "--all-vertices", action="store_true", help="Tree games: let the hider use every vertex"
    )
    check.add_argument("--workers", type=int, default=1, help="Files verified concurrently")
    check.add_argument("--format", choices=["text", "json"], default="text")

    sample = sub.add_parser("sample", help="Draw searches from the optimal searcher strategy")
    sample.add_argument("file", help="Instance file")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--count", type=int, default=1)
    sample.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def cmd_solve(args: argparse.Namespace) -> int:
    target = load_instance(args.file)
    cost_paid = None
    if isinstance(target, RootedTree):
        solution = solve_tree(target)
    else:
        game = to_game(target)
        try:
            solution = solve_closed_form(game.spec, game.k)
        except NotIndexableError as exc:
            raise NotIndexableError(
                f"{exc.message}. Run `verify --oracle-only {args.file}` for the matrix-game value",
                report=exc.report,
            ) from exc
        if args.cost_view:
            if not isinstance(game.spec, (AdditiveCost, TravelSearch)):
                raise UnsupportedError("--cost-view applies to additive and travel-search files")
            cost_paid = cost_paid_view(game.spec, solution.value)
    print(
        generate_report(
            "solution",
            args.format,
            solution=solution,
            document=dump_document(target),
            cost_paid=cost_paid,
        )
    )
    return EXIT_OK


def cmd_best_response(args: argparse.Namespace) -> int:
    target = load_instance(args.file)
    if isinstance(target, RootedTree):
        raise UnsupportedError("best-response covers unstructured games; tree files are not supported")
    game = to_game(target)
    if game.k != 1:
        raise UnsupportedError(f"best-response needs k = 1, the file has k = {game.k}")
    problem = ResponseProblem.from_weights(game.spec, load_hider(args.hider))
    direction = "minimize" if args.min else "maximize"
    order = index_order(problem, direction)
    print(
        generate_report(
            "best_response",
            args.format,
            direction=direction,
            indices=index_values(problem),
            order=order,
            payoff=response_payoff(problem, order),
        )
    )
    return EXIT_OK


def _verify_file(path: str, args: argparse.Namespace):
    """(report, error message, exit code) for one file."""
    try:
        target = load_instance(path)
        report = verify(
            target,
            epsilon=args.epsilon,
            method=args.method,
            include_all_vertices=args.all_vertices,
            oracle_only=args.oracle_only,
        )
    except RescueGameError as exc:
        logger.log_event(
            "cli_command_failed", level="WARNING", command="verify", file=path, **exc.to_dict()
        )
        return None, exc.message, exc.exit_code
    return report, None, EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    workers = max(1, args.workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda path: _verify_file(path, args), args.files))
    outcomes = [(path, report, error) for path, (report, error, _) in zip(args.files, results)]
    print(generate_report("verification", args.format, outcomes=outcomes))
    return max(code for _, _, code in results)


def cmd_sample(args: argparse.Namespace) -> int:
    if args.count < 1:
        raise InvalidArgumentError("--count must be at least 1")
    target = load_instance(args.file)
    rng = random.Random(args.seed)
    if isinstance(target, RootedTree):
        solution = solve_tree(target)
        searches = [sample_search(target, solution, rng=rng) for _ in range(args.count)]
    else:
        game = to_game(target)
        closed = solve_closed_form(game.spec, game.k)
        searches = [sample_s_a_order(game.ids, closed.searcher, rng) for _ in range(args.count)]
    print(generate_report("sample", args.format, searches=searches))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "best-response": cmd_best_response,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.log_event("cli_command_started", level="DEBUG", command=args.command)
    try:
        return COMMANDS[args.command](args)
    except RescueGameError as exc:
        logger.log_event(
            "cli_command_failed", level="WARNING", command=args.command, **exc.to_dict()
        )
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
