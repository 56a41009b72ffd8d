"""Weights of natural PBs and their correspondence with integer partitions.

A natural PB of weight n (n brace pairs inside its bracket form) is a
partition of n: each member of index k is a part k. So the weight-n PBs
number P(n), exactly one of them ({n}) is prime, and listing weights
0, 1, 2, ... gives a well ordering of all natural PBs.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from typing import NamedTuple, Optional

import mpmath

from convert import pb_to_rational
from errors import DomainError, ResourceLimitError
from pbnum import ONE, TWO, PrimeBag, div, is_prime_pb, require_natural
from settings import get_settings

logger = logging.getLogger(__name__)

Partition = tuple[int, ...]


class GeneratedBag(NamedTuple):
    """One element of the ordered stream and how it was produced.

    ``rule`` is 0 for the empty bag, 1 when the element is its parent with
    an empty bag ({1}) added, 2 when one member of the parent was wrapped
    (index k -> k + 1).
    """

    weight: int
    bag: PrimeBag
    rule: int
    parent: Optional[PrimeBag]


class PartitionRow(NamedTuple):
    weight: int
    partition: Partition
    bag: PrimeBag
    value: int
    prime: bool


def weight(a: PrimeBag) -> int:
    """Sum of k * m_k: the number of brace pairs inside the bracket form."""
    require_natural("weight", a)
    return sum(k * m.numerator for k, m in a.entries)


def partition_of(a: PrimeBag) -> Partition:
    """Member indices, largest first."""
    require_natural("partition", a)
    parts: list[int] = []
    for k, m in a.entries:
        parts.extend([k] * m.numerator)
    return tuple(parts)


def bag_of(parts: Partition) -> PrimeBag:
    if any(p < 1 for p in parts):
        raise DomainError(f"partition parts must be positive, got {parts}")
    return PrimeBag.from_members(parts)


def _check_ceiling(n: int) -> None:
    if n < 0:
        raise DomainError(f"weight must be >= 0, got {n}")
    ceiling = get_settings().enumeration_ceiling
    if n > ceiling:
        raise ResourceLimitError(
            f"enumerating weight {n} exceeds the enumeration ceiling {ceiling}"
        )


def partitions_descending(n: int) -> Iterator[Partition]:
    """Partitions of n in reverse-lexicographic order, parts largest first."""
    if n == 0:
        yield ()
        return
    parts = [n]
    while True:
        yield tuple(parts)
        # Strip trailing 1s, then lower the last part >1 and refill with copies of it.
        ones = 0
        while parts and parts[-1] == 1:
            parts.pop()
            ones += 1
        if not parts:
            return
        part = parts.pop() - 1
        parts.append(part)
        rest = ones + 1
        while rest >= part:
            parts.append(part)
            rest -= part
        if rest:
            parts.append(rest)


def enumerate_weight(n: int) -> list[PrimeBag]:
    """All natural PBs of weight n, in reverse-lexicographic partition order."""
    _check_ceiling(n)
    return [bag_of(parts) for parts in partitions_descending(n)]


def partition_count(n: int) -> int:
    """P(n) by the dynamic program over largest allowed part; P(0) = 1."""
    if n < 0:
        raise DomainError(f"P(n) needs n >= 0, got {n}")
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            ways[total] += ways[total - part]
    return ways[n]


def _generalized_pentagonals(limit: int) -> Iterator[tuple[int, int]]:
    """(pentagonal number, sign) pairs up to ``limit``: 1+, 2+, 5-, 7-, 12+, ..."""
    k = 1
    while True:
        sign = 1 if k % 2 else -1
        first = k * (3 * k - 1) // 2
        if first > limit:
            return
        yield first, sign
        second = first + k
        if second > limit:
            return
        yield second, sign
        k += 1


def partition_count_pentagonal(n: int) -> int:
    """P(n) by Euler's pentagonal number recurrence; cross-checks the DP."""
    if n < 0:
        raise DomainError(f"P(n) needs n >= 0, got {n}")
    table = [1]
    for m in range(1, n + 1):
        table.append(sum(sign * table[m - g] for g, sign in _generalized_pentagonals(m)))
    return table[n]


def hr_estimate(n: int) -> mpmath.mpf:
    """Leading asymptotic exp(pi * sqrt(2n/3)) / (4 n sqrt(3)) for P(n)."""
    if n < 1:
        raise DomainError(f"the estimate needs n >= 1, got {n}")
    with mpmath.workprec(max(64, mpmath.mp.prec)):
        return mpmath.exp(mpmath.pi * mpmath.sqrt(mpmath.mpf(2 * n) / 3)) / (
            4 * n * mpmath.sqrt(3)
        )


def _provenance(bag: PrimeBag) -> tuple[int, Optional[PrimeBag]]:
    if bag == ONE:
        return 0, None
    if 1 in bag.multiplicities:
        return 1, div(bag, TWO)
    smallest = bag.entries[-1][0]
    parent = PrimeBag.from_entries(list(bag.entries) + [(smallest, -1), (smallest - 1, 1)])
    return 2, parent


def generate_ordered(max_weight: int) -> Iterator[GeneratedBag]:
    """Every natural PB of weight <= max_weight, grouped by weight.

    Each element (but {}) records its weight-(n-1) parent: Rule 1 when the
    element has a member {1}, else Rule 2 undone on its smallest member.
    """
    _check_ceiling(max_weight)
    for n in range(max_weight + 1):
        for bag in enumerate_weight(n):
            rule, parent = _provenance(bag)
            yield GeneratedBag(n, bag, rule, parent)


def partition_rows(n: int) -> list[PartitionRow]:
    """Rows of the weight-n table: partition, PB, value and primality."""
    return [
        PartitionRow(
            n,
            partition_of(bag),
            bag,
            pb_to_rational(bag).numerator,
            is_prime_pb(bag),
        )
        for bag in enumerate_weight(n)
    ]
