"""
Integer partitions with weakly decreasing parts, in reverse lexicographic order.
"""
from functools import lru_cache
from typing import Iterator, Tuple

import structlog

from .errors import PartitionCapError, PreconditionError

logger = structlog.get_logger()

MAX_ORDER = 60


class Partition(tuple):
    """Weakly decreasing tuple of positive integers"""

    def __new__(cls, parts):
        parts = tuple(int(p) for p in parts)
        if not parts or any(p < 1 for p in parts):
            raise PreconditionError(f"partition parts must be positive integers: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise PreconditionError(f"partition parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"Partition{tuple(self)}"


def _descend(remaining: int, largest: int) -> Iterator[Tuple[int, ...]]:
    if remaining == 0:
        yield ()
        return
    for first in range(min(remaining, largest), 0, -1):
        for rest in _descend(remaining - first, first):
            yield (first,) + rest


@lru_cache(maxsize=MAX_ORDER)
def _partitions_cached(k: int) -> Tuple[Partition, ...]:
    result = tuple(Partition(parts) for parts in _descend(k, k))
    logger.debug(f"enumerated partitions of {k}", count=len(result))
    return result


def partitions_of(k: int) -> Tuple[Partition, ...]:
    """Every partition of k exactly once, largest first part first"""
    if not 1 <= k <= MAX_ORDER:
        raise PartitionCapError(f"partition order must lie in 1..{MAX_ORDER}, got {k}")
    return _partitions_cached(k)
