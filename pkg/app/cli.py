"""
Command-line front-end: entropy, certify, klein, converge and catalog subcommands.

Reports go to standard output (or --output) as JSON; logs go to stderr.

Exit codes:
    0  success, or no violation found
    2  usage, configuration or input error
    3  violation found
    4  infinite entropy where a finite value was expected
"""

import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

from app.certify.monotonicity import lowner_matrix_test, search_counterexample
from app.config.settings import settings
from app.entropy.relative import relative_entropy, relative_entropy_on_interval
from app.errors import (
    ConfigError,
    InfiniteEntropyError,
    InternalConsistencyError,
    MonotonicityViolationError,
    OpEntropyError,
)
from app.io.files import read_json, read_matrix, read_oracle, write_report
from app.klein.survey import klein_survey
from app.limits.limits import entropy_limit
from app.models.entropy import KernelPolicy
from app.models.reports import ProjectionSchedule
from app.models.run import CERTIFY_MODES, DEFAULT_SCHEDULE, SUBCOMMANDS, Report, RunConfig
from app.phi.catalog import catalog_listing, parse_phi
from app.phi.quadrature import QuadratureConfig
from app.utils.logging import setup_logging
from app.version import library_info

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3
EXIT_INFINITE = 4

ORACLE_KINDS = ('diagonal', 'banded', 'embedded')


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so usage errors share the exit-code path."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}", field='arguments')


def _interval(text: str):
    try:
        lo, hi = (float(piece) for piece in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got '{text}'") from None
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', dest='config_file', help="JSON file whose fields override the flags it names")
    common.add_argument('--output', help="Write the JSON report to this file instead of standard output")
    common.add_argument('--log-level', dest='log_level', help="DEBUG, INFO, WARNING or ERROR (stderr)")
    common.add_argument('--phi', help="Generating function NAME[:p1,p2], e.g. vn or power_neg:0.5")
    common.add_argument('--eigen-tol', dest='eigen_tol', type=float, help="Endpoint snapping tolerance")
    common.add_argument('--match-tol', dest='match_tol', type=float, help="Kernel matching tolerance")
    common.add_argument('--workers', type=int, help="Threads for independent trials")

    parser = _Parser(prog='opentropy', description="Generalized operator relative entropy toolkit")
    sub = parser.add_subparsers(dest='subcommand', metavar='SUBCOMMAND')

    entropy = sub.add_parser('entropy', parents=[common], argument_default=argparse.SUPPRESS,
                             help="Evaluate H(A,B) for two matrix files")
    entropy.add_argument('--a', help="Matrix file for A")
    entropy.add_argument('--b', help="Matrix file for B")
    entropy.add_argument('--interval', type=_interval, help="Spectral interval 'lo,hi' instead of [0, 1]")
    entropy.add_argument('--expect-finite', dest='expect_finite', action='store_true',
                         help="Exit 4 when the value is infinite")

    certify = sub.add_parser('certify', parents=[common], argument_default=argparse.SUPPRESS,
                             help="Search for operator-monotonicity violations")
    certify.add_argument('--dim', type=int, help="Operator dimension")
    certify.add_argument('--trials', type=int, help="Trials per mode")
    certify.add_argument('--seed', type=int, help="Base seed (required)")
    certify.add_argument('--mode', choices=CERTIFY_MODES, help="Certificate to run")
    certify.add_argument('--n-points', dest='n_points', type=int, help="Points per Löwner matrix")
    certify.add_argument('--edge', action='store_true', help="Contraction spectra in [0, 1] with endpoint eigenvalues")

    klein = sub.add_parser('klein', parents=[common], argument_default=argparse.SUPPRESS,
                           help="Derive Klein constants and survey the defects")
    klein.add_argument('--dim', type=int, help="Operator dimension")
    klein.add_argument('--trials', type=int, help="Number of seeded triples")
    klein.add_argument('--seed', type=int, help="Base seed (required)")
    klein.add_argument('--eps', type=float, help="Spectral band margin for the Lipschitz bound")
    klein.add_argument('--grid', type=int, help=f"Derivation grid (default {settings.KLEIN_GRID})")

    converge = sub.add_parser('converge', parents=[common], argument_default=argparse.SUPPRESS,
                              help="Projection limit along a truncation schedule")
    converge.add_argument('--a-oracle', dest='a_oracle', help="Oracle for A: [diagonal:|banded:|embedded:]FILE")
    converge.add_argument('--b-oracle', dest='b_oracle', help="Oracle for B: [diagonal:|banded:|embedded:]FILE")
    converge.add_argument('--schedule', help=f"Comma-separated truncation sizes (default {DEFAULT_SCHEDULE})")
    converge.add_argument('--rel-tol', dest='rel_tol', type=float, help="Relative convergence tolerance")

    sub.add_parser('catalog', parents=[common], argument_default=argparse.SUPPRESS,
                   help="List the built-in generating functions")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Settings defaults, then flags, then the --config file for the fields it names."""
    values: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in ('config_file', 'log_level')}
    config_file = getattr(args, 'config_file', None)
    if config_file:
        overrides = read_json(config_file, 'config')
        if not isinstance(overrides, dict):
            raise ConfigError(f"config: '{config_file}' must hold a JSON object", field='config')
        overrides.pop('log_level', None)
        values.update(overrides)
    if not values.get('subcommand'):
        raise ConfigError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}", field='subcommand')
    return RunConfig.from_dict(values)


def _policy(config: RunConfig) -> KernelPolicy:
    return KernelPolicy(config.eigen_tol, config.match_tol)


def _oracle(text: str, field: str):
    kind, sep, path = text.partition(':')
    if sep and kind in ORACLE_KINDS:
        return read_oracle(path, field, kind=kind)
    return read_oracle(text, field)


def run_entropy(config: RunConfig):
    phi = parse_phi(config.phi)
    A, B = read_matrix(config.a, 'a'), read_matrix(config.b, 'b')
    if config.interval is not None:
        value = relative_entropy_on_interval(A, B, phi, config.interval)
    else:
        value = relative_entropy(A, B, phi, _policy(config))
    code = EXIT_INFINITE if config.expect_finite and not value.is_finite else EXIT_OK
    return value.to_dict(), code


def run_certify(config: RunConfig):
    phi = parse_phi(config.phi)
    reports = {}
    if config.mode in ('lowner', 'all'):
        reports['lowner'] = lowner_matrix_test(phi, config.n_points, config.trials, config.seed, config.workers)
    if config.mode != 'lowner':
        modes = ('contraction', 'pinching') if config.mode == 'all' else (config.mode,)
        reports['search'] = search_counterexample(phi, config.dim, config.trials, config.seed, modes=modes,
                                                  edge=config.edge, policy=_policy(config), workers=config.workers)
    violated = any(r.violated for r in reports.values())
    results = {name: report.to_dict() for name, report in reports.items()}
    results['verdict'] = "ViolationFound" if violated else "ConsistentWithMonotone"
    return results, EXIT_VIOLATION if violated else EXIT_OK


def run_klein(config: RunConfig):
    phi = parse_phi(config.phi)
    results = klein_survey(phi, config.dim, config.trials, config.seed, config.eps, config.grid,
                           _policy(config), config.workers)
    return results, EXIT_VIOLATION if results['verdict'] == "ViolationFound" else EXIT_OK


def run_converge(config: RunConfig):
    phi = parse_phi(config.phi)
    A, B = _oracle(config.a_oracle, 'a_oracle'), _oracle(config.b_oracle, 'b_oracle')
    schedule = ProjectionSchedule.parse(config.schedule)
    result = entropy_limit(A, B, phi, schedule, config.rel_tol, _policy(config), config.workers)
    return result.to_dict(), EXIT_OK


def run_catalog(config: RunConfig):
    return catalog_listing(), EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig], Any]] = {
    'entropy': run_entropy,
    'certify': run_certify,
    'klein': run_klein,
    'converge': run_converge,
    'catalog': run_catalog,
}


def _metadata(config: RunConfig) -> Dict[str, Any]:
    return {
        'policy': _policy(config).to_dict(),
        'quadrature': QuadratureConfig.from_settings().to_dict(),
        'klein_grid': config.grid or settings.KLEIN_GRID,
        'settings': settings.to_dict(),
    }


def run(config: RunConfig) -> Report:
    """Dispatch to the owning module and assemble the report."""
    started = time.perf_counter()
    results, code = HANDLERS[config.subcommand](config)
    elapsed = time.perf_counter() - started
    return Report(
        library=library_info(),
        config=config.to_dict(),
        results=results,
        metadata=_metadata(config),
        timing={'wall_seconds': elapsed},
        exit_code=code,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        setup_logging(settings.LOG_LEVEL)
        logger.error(str(exc))
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    setup_logging(getattr(args, 'log_level', None) or settings.LOG_LEVEL)
    try:
        config = config_from_args(args)
        report = run(config)
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_USAGE
    except InfiniteEntropyError as exc:
        logger.error(f"Infinite entropy where a finite value is required: {exc}")
        return EXIT_INFINITE
    except MonotonicityViolationError as exc:
        logger.error(f"Monotonicity violation: {exc}")
        return EXIT_VIOLATION
    except InternalConsistencyError as exc:
        logger.error(f"Internal consistency failure: {exc}")
        return EXIT_INTERNAL
    except OpEntropyError as exc:
        logger.error(f"Invalid input: {exc}")
        return EXIT_USAGE

    text = write_report(report.to_dict(), config.output)
    if config.output is None:
        sys.stdout.write(text + "\n")
    logger.info(f"{config.subcommand} finished in {report.timing['wall_seconds']:.3f}s with exit code {report.exit_code}")
    return report.exit_code
