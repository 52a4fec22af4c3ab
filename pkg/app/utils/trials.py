"""
Deterministic runner for independent trials.
Results are always returned in input order, whatever the completion order.
"""

import contextvars
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.config.settings import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


class TrialRunner:
    """Runs a pure function over trial inputs, serially or on a thread pool."""

    def __init__(self, max_workers: Optional[int] = None, label: str = "trials"):
        """
        Initialize the runner.

        Args:
            max_workers: Thread count; settings.MAX_WORKERS when omitted, 1 means serial
            label: Name used in log lines
        """
        self.max_workers = max(1, int(max_workers or settings.MAX_WORKERS))
        self.label = label

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply `fn` to every item; the i-th result belongs to the i-th item."""
        items = list(items)
        start = time.perf_counter()

        if self.max_workers == 1 or len(items) <= 1:
            results = [fn(item) for item in items]
        else:
            # Workers inherit the caller's log context; Executor.map yields in submission order
            context = contextvars.copy_context()
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                results = list(pool.map(lambda item: context.copy().run(fn, item), items))

        logger.debug(f"{self.label}: {len(results)} trials on {self.max_workers} worker(s) "
                     f"in {time.perf_counter() - start:.3f}s")
        return results
