"""
Bounded worker pool for independent Monte Carlo trials.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from src.config.settings import settings

logger = logging.getLogger("parallel")

T = TypeVar("T")


class TrialPool:
    """Runs a picklable trial function over trial indices; results come back in index order."""

    def __init__(self, workers: Optional[int] = None, chunksize: int = 16):
        self.workers = max(1, workers or settings.threads)
        self.chunksize = chunksize

    def map(self, fn: Callable[[int], T], indices: Sequence[int]) -> List[T]:
        indices = list(indices)
        if self.workers == 1 or len(indices) < 2:
            return [fn(i) for i in indices]
        logger.debug(f"Dispatching {len(indices)} trials to {self.workers} workers")
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(fn, indices, chunksize=self.chunksize))

    def count(self, fn: Callable[[int], bool], trials: int) -> int:
        return sum(1 for hit in self.map(fn, range(trials)) if hit)
