#!/usr/bin/env python3
"""
Tests for partition enumeration
"""

import sys
from pathlib import Path

import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import PartitionCapError, PreconditionError
from src.core.partitions import MAX_ORDER, Partition, partitions_of


def count_partitions(k: int) -> int:
    """Partition numbers by the coin-change recurrence"""
    ways = [1] + [0] * k
    for part in range(1, k + 1):
        for total in range(part, k + 1):
            ways[total] += ways[total - part]
    return ways[k]


def test_small_orders():
    assert partitions_of(1) == ((1,),)
    assert partitions_of(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))


@pytest.mark.parametrize("k", range(1, 16))
def test_counts_match_recurrence(k):
    assert len(partitions_of(k)) == count_partitions(k)


def test_order_ten():
    assert len(partitions_of(10)) == 42


@pytest.mark.parametrize("k", [6, 9, 12])
def test_partitions_are_distinct_and_well_formed(k):
    result = partitions_of(k)
    assert len(set(result)) == len(result)
    for eta in result:
        assert eta.weight == k
        assert all(a >= b for a, b in zip(eta, eta[1:]))
    # reverse lexicographic
    assert list(result) == sorted(result, reverse=True)


def test_partition_properties():
    eta = Partition((3, 1))
    assert eta.weight == 4
    assert eta.length == 2


@pytest.mark.parametrize("parts", [(1, 2), (2, 0), ()])
def test_invalid_partitions(parts):
    with pytest.raises(PreconditionError):
        Partition(parts)


@pytest.mark.parametrize("k", [0, MAX_ORDER + 1])
def test_order_cap(k):
    with pytest.raises(PartitionCapError):
        partitions_of(k)
