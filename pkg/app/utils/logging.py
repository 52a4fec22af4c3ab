"""
Structured logging configuration for the library and CLI.

Certification runs bind their fields (component, phi, seed, trial) with LogContext;
every record logged inside the block carries them as attributes, including records
emitted from TrialRunner worker threads.
"""

import logging
import sys
import threading
from contextvars import ContextVar
from typing import Any, Dict, Optional

# Record attributes filled from the bound context, in display order
CONTEXT_FIELDS = ('component', 'phi', 'seed', 'trial')

_bound: ContextVar[Dict[str, Any]] = ContextVar('opentropy_log_fields', default={})
_factory_lock = threading.Lock()
_factory_installed = False


def bound_fields() -> Dict[str, Any]:
    """Fields bound in the current context."""
    return dict(_bound.get())


def _install_record_factory() -> None:
    global _factory_installed
    with _factory_lock:
        if _factory_installed:
            return
        base = logging.getLogRecordFactory()

        def record_factory(*args, **kwargs):
            record = base(*args, **kwargs)
            fields = _bound.get()
            for key in CONTEXT_FIELDS:
                setattr(record, key, fields.get(key))
            record.context = ' '.join(f"{key}={fields[key]}" for key in CONTEXT_FIELDS if key in fields)
            return record

        logging.setLogRecordFactory(record_factory)
        _factory_installed = True


class LogContext:
    """
    Bind certification fields to the records logged inside a `with` block.

    Nested blocks merge their fields; None values are ignored. Binding lives in a
    ContextVar, so concurrent trials never see each other's fields.
    """

    def __init__(self, **fields):
        unknown = set(fields) - set(CONTEXT_FIELDS)
        if unknown:
            raise ValueError(f"unknown log context fields: {sorted(unknown)}")
        self.fields = {key: value for key, value in fields.items() if value is not None}
        self._token = None

    def __enter__(self):
        _install_record_factory()
        self._token = _bound.set({**_bound.get(), **self.fields})
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        _bound.reset(self._token)


class ConsoleFormatter(logging.Formatter):
    """Console formatter: appends the bound fields and optionally colors the level name."""

    # ANSI color codes
    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def __init__(self, fmt: Optional[str] = None, datefmt: Optional[str] = None, use_colors: bool = False):
        super().__init__(fmt, datefmt)
        self.use_colors = use_colors

    def format(self, record):
        # Work on a copy: other handlers see the plain level name
        shown = logging.makeLogRecord(record.__dict__)
        if self.use_colors and record.levelname in self.COLORS:
            shown.levelname = f"{self.COLORS[record.levelname]}{record.levelname}{self.RESET}"
        text = super().format(shown)
        context = getattr(record, 'context', '')
        return f"{text} [{context}]" if context else text


def setup_logging(log_level: str = 'INFO', use_colors: bool = True) -> None:
    """
    Set up logging for the library.

    Records go to stderr: stdout carries the JSON reports.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        use_colors: Whether to color level names when stderr is a terminal
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)
    _install_record_factory()

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    # Remove existing handlers to avoid duplicates
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(ConsoleFormatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                                                  datefmt='%Y-%m-%d %H:%M:%S',
                                                  use_colors=use_colors and sys.stderr.isatty()))
    root_logger.addHandler(console_handler)

    logging.debug("Logging initialized at level %s", log_level)


def log_certification_event(logger: logging.Logger, mode: str, phi_name: str, verdict: str,
                            trials: int, worst_defect: float, seed: Optional[int] = None):
    """Log the outcome of a certification run."""
    with LogContext(component='certify', phi=phi_name, seed=seed):
        message = f"Certification {mode} {verdict}: trials={trials} worst_defect={worst_defect:.3e}"
        if verdict == 'ViolationFound':
            logger.warning(message)
        else:
            logger.info(message)


def log_limit_event(logger: logging.Logger, phi_name: str, verdict: str, details: dict):
    """Log a projection-limit verdict."""
    with LogContext(component='limits', phi=phi_name):
        logger.info(f"Limit {verdict}: {details}")


def log_constant_derivation(logger: logging.Logger, phi_name: str, constants: dict, stable: bool):
    """Log derived Klein constants."""
    with LogContext(component='klein', phi=phi_name):
        if stable:
            logger.info(f"Klein constants: {constants}")
        else:
            logger.warning(f"Klein constants unstable under grid doubling: {constants}")
