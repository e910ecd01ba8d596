"""
Bilocal Network Checker - command-line entry point.

Subcommands:
- assess: Horodecki/CHSH, concurrence, locality variables and steering of one state
- bilocal: analytic bound and numeric maximum of the bilocal quantity for two states
- swap: Bell-measurement branches of two states
- filter: local filtering and the filtered CHSH bound
- scan: grid scans for the figure regions or a config file

State specs: x:ς,κ,ζ,d,p,q | t:c1,c2,c3 | werner:α | alpha:α' | hidden:α
"""
import argparse
import logging
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from bilocal.criteria import (
    FilterParams, filtered_chsh_bound, hidden_filter, hidden_nonlocality_state, steering_report,
)
from bilocal.exceptions import (
    DegenerateBranchError, DomainViolationError, EmitError, ScanConfigError, StateValidationError,
)
from bilocal.network import BILOCAL_MODES, compare_bilocal, swap
from bilocal.reporting import assess_lines, bilocal_lines, filter_lines, swap_lines
from bilocal.scan import FAMILIES, emit, figure_config, read_scan_config, run_scan
from bilocal.states import (
    TParams, XParams, alpha_state, alpha_state_t, chsh_report, concurrence_t,
    concurrence_x_oracle, locality_vars, require_valid_x, t_to_x, werner, x_state_matrix,
)
from config import EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_IO_ERROR, EXIT_OK

logger = logging.getLogger(__name__)

FIGURE_CHOICES = ["2", "3", "4", "5", "6"] + sorted(n for n in FAMILIES if not n.startswith("fig"))


@dataclass(frozen=True)
class StateSpec:
    """A parsed state argument."""
    label: str
    x: XParams
    t: Optional[TParams]
    family: str = "x"
    alpha: Optional[float] = None


def _parse_values(text: str, body: str, count: int) -> List[float]:
    parts = [p.strip() for p in body.split(",")] if body.strip() else []
    if len(parts) != count:
        raise StateValidationError(f"'{text}': expected {count} value(s), got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise StateValidationError(f"'{text}': values must be numbers")


def parse_state_spec(text: str) -> StateSpec:
    """
    Parse a family-prefixed comma list into state parameters.

    Raises:
        StateValidationError: On an unknown family, wrong arity or an invalid state
        DomainViolationError: On an out-of-range hidden-nonlocality parameter
    """
    family, sep, body = text.partition(":")
    family = family.strip().lower()
    if not sep:
        raise StateValidationError(f"'{text}': expected family:values")

    if family == "x":
        x = XParams(*_parse_values(text, body, 6))
        require_valid_x(x)
        return StateSpec(text, x, None)
    if family == "t":
        t = TParams(*_parse_values(text, body, 3))
        return StateSpec(text, t_to_x(t), t, family)
    if family == "werner":
        t = werner(_parse_values(text, body, 1)[0])
        return StateSpec(text, t_to_x(t), t, family)
    if family == "alpha":
        a = _parse_values(text, body, 1)[0]
        return StateSpec(text, alpha_state(a), alpha_state_t(a), family, a)
    if family == "hidden":
        a = _parse_values(text, body, 1)[0]
        return StateSpec(text, hidden_nonlocality_state(a), None, family, a)
    raise StateValidationError(f"'{text}': unknown state family '{family}' "
                               f"(x, t, werner, alpha, hidden)")


def cmd_assess(args: argparse.Namespace) -> int:
    spec = parse_state_spec(args.state)
    chsh = chsh_report(x_state_matrix(spec.x))
    concurrence = concurrence_t(spec.t) if spec.t is not None else concurrence_x_oracle(spec.x)
    try:
        steering, steering_error = steering_report(spec.x), None
    except DegenerateBranchError as e:
        steering, steering_error = None, str(e)
    lines = assess_lines(spec.label, spec.x, spec.t, chsh, concurrence,
                         locality_vars(spec.x), steering, steering_error)
    print("\n".join(lines))
    return EXIT_OK


def cmd_bilocal(args: argparse.Namespace) -> int:
    first = parse_state_spec(args.state1)
    second = parse_state_spec(args.state2)
    result = compare_bilocal(first.x, second.x, args.mode, args.workers)
    print("\n".join(bilocal_lines(result.bound, result.numeric, result.gap, result.verdict)))
    return EXIT_OK


def cmd_swap(args: argparse.Namespace) -> int:
    first = parse_state_spec(args.state1)
    second = parse_state_spec(args.state2)
    print("\n".join(swap_lines(swap(first.x, second.x))))
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    spec = parse_state_spec(args.state)
    if args.l1 is None and args.l2 is None and spec.family == "hidden":
        filters = hidden_filter(spec.alpha or 0.0)
    elif args.l1 is None or args.l2 is None:
        raise DomainViolationError("--l1 and --l2 are required for this state")
    else:
        filters = FilterParams(args.l1, args.l2)
    report = filtered_chsh_bound(spec.x, filters)
    print("\n".join(filter_lines(report, filters.lambda1, filters.lambda2)))
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    if args.config:
        cfg = read_scan_config(args.config)
    else:
        figure = int(args.fig) if args.fig.isdigit() else args.fig
        cfg = figure_config(figure, args.step)
    records = run_scan(cfg, workers=args.workers)
    emit(records, args.format, args.out if args.out else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bilocal-checker",
        description="Nonbilocality analysis of entanglement-swapping networks built from X states.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output (stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="Assess a single two-qubit state")
    p.add_argument("state", help="x:ς,κ,ζ,d,p,q | t:c1,c2,c3 | werner:α | alpha:α' | hidden:α")
    p.set_defaults(handler=cmd_assess)

    p = sub.add_parser("bilocal", help="Bilocal bound and numeric maximum for two states")
    p.add_argument("state1")
    p.add_argument("state2")
    p.add_argument("--mode", choices=BILOCAL_MODES, default="both")
    p.add_argument("--workers", type=int, default=None, help="Processes for the optimizer starts")
    p.set_defaults(handler=cmd_bilocal)

    p = sub.add_parser("swap", help="Bell-measurement branches of two states")
    p.add_argument("state1")
    p.add_argument("state2")
    p.set_defaults(handler=cmd_swap)

    p = sub.add_parser("filter", help="Filtered state and CHSH bound")
    p.add_argument("state")
    p.add_argument("--l1", type=float, default=None, help="Alice's filter attenuation λ1")
    p.add_argument("--l2", type=float, default=None, help="Bob's filter attenuation λ2")
    p.set_defaults(handler=cmd_filter)

    p = sub.add_parser("scan", help="Grid scan of a figure region or a config file")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--fig", choices=FIGURE_CHOICES, help="Built-in region")
    source.add_argument("--config", help="Scan config file (key = value lines)")
    p.add_argument("--step", type=float, default=0.01, help="Grid step for --fig")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="Output file (default stdout)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=cmd_scan)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_INPUT_ERROR

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        return args.handler(args)
    except (StateValidationError, DomainViolationError, ScanConfigError,
            DegenerateBranchError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (EmitError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    except Exception:
        logger.exception(f"Unexpected error running '{args.command}'")
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
