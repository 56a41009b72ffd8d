"""Primes: the index <-> prime bijection, primality and factoring.

Prime indices are 1-based (index 1 is the prime 2). The primes themselves
come from a sieve cache that is extended on demand, segment by segment,
up to ``Settings.prime_ceiling``; nothing past the ceiling is ever sieved,
so ``nth_prime``/``prime_index`` fail loudly instead of eating memory.

Primality of arbitrary naturals uses the cache below the sieved limit,
a deterministic Miller-Rabin witness set below 2**64 and a seeded random
strong-probable-prime test above it. Factoring (used by the conversion
bridge) is trial division by cached primes followed by Pollard-rho with
Brent's cycle detection.
"""

from __future__ import annotations

import logging
import random
import threading
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from math import gcd, isqrt
from typing import Optional

from errors import ConversionTimeoutError, DomainError, NotPrimeError, ResourceLimitError
from settings import get_settings

logger = logging.getLogger(__name__)

# Deterministic Miller-Rabin bases: correct for every n < 3.3 * 10**24 > 2**64.
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DETERMINISTIC_LIMIT = 2**64

# Primes below this are sieved eagerly when the table is created.
_INITIAL_LIMIT = 1 << 12

# Largest segment sieved in one step (bytes).
_MAX_SEGMENT = 1 << 24

# Brent batch size: product of differences accumulated before one gcd.
_RHO_BATCH = 128


# ---------------------------------------------------------------------------
# Work accounting
# ---------------------------------------------------------------------------


@dataclass
class WorkTally:
    """Counters for the expensive side of the PB <-> positional bridge.

    Counters only ever increase; conversion receipts expose them.
    ``modular_squarings`` counts Miller-Rabin squarings and stays out of
    ``total``, which counts bridge events.
    """

    trial_divisions: int = 0
    primality_tests: int = 0
    rho_iterations: int = 0
    factor_splits: int = 0
    modular_squarings: int = 0

    @property
    def total(self) -> int:
        return (
            self.trial_divisions
            + self.primality_tests
            + self.rho_iterations
            + self.factor_splits
        )

    def absorb(self, other: "WorkTally") -> None:
        self.trial_divisions += other.trial_divisions
        self.primality_tests += other.primality_tests
        self.rho_iterations += other.rho_iterations
        self.factor_splits += other.factor_splits
        self.modular_squarings += other.modular_squarings


# ---------------------------------------------------------------------------
# Sieve cache
# ---------------------------------------------------------------------------


class PrimeTable:
    """Monotone cache of all primes below ``limit``.

    Reads are lock-free: the list only grows by ``extend`` and indices that
    were valid stay valid with the same value. Extension is serialized.
    """

    def __init__(self, ceiling: int) -> None:
        self.ceiling = ceiling
        self._lock = threading.Lock()
        self._primes: list[int] = []
        self._limit = 2
        self._extend_locked(min(_INITIAL_LIMIT, ceiling))

    @property
    def limit(self) -> int:
        """Every prime strictly below this value is cached."""
        return self._limit

    def __len__(self) -> int:
        return len(self._primes)

    def _extend_locked(self, new_limit: int) -> None:
        lo, hi = self._limit, new_limit
        if hi <= lo:
            return
        segment = bytearray([1]) * (hi - lo)
        if lo <= 1:
            for j in range(lo, min(2, hi)):
                segment[j - lo] = 0
        root = isqrt(hi - 1)
        for p in self._primes:
            if p > root:
                break
            start = max(p * p, -(-lo // p) * p)
            if start < hi:
                segment[start - lo :: p] = bytes(len(range(start - lo, hi - lo, p)))
        if not self._primes:
            # First segment: sieve with its own primes.
            for i in range(max(lo, 2), root + 1):
                if segment[i - lo]:
                    start = max(i * i, -(-lo // i) * i)
                    segment[start - lo :: i] = bytes(len(range(start - lo, hi - lo, i)))
        fresh = [lo + i for i, flag in enumerate(segment) if flag]
        self._primes.extend(fresh)
        logger.debug(
            "prime sieve extended [%d, %d): %d new primes, %d total",
            lo,
            hi,
            len(fresh),
            len(self._primes),
        )
        self._limit = hi

    def ensure_limit(self, bound: int) -> None:
        """Sieve so that every prime below ``bound`` is cached."""
        if bound <= self._limit:
            return
        if bound > self.ceiling:
            raise ResourceLimitError(
                f"primes up to {bound} are needed but the sieve ceiling is "
                f"{self.ceiling} (raise PRIME_BAG_PRIME_CEILING)"
            )
        with self._lock:
            # sqrt(new limit) must stay below the old limit: base primes are cached.
            while self._limit < bound:
                lo = self._limit
                self._extend_locked(
                    min(max(bound, 2 * lo), lo * lo, lo + _MAX_SEGMENT, self.ceiling)
                )

    def ensure_count(self, count: int) -> None:
        """Sieve until at least ``count`` primes are cached."""
        while len(self._primes) < count:
            if self._limit >= self.ceiling:
                raise ResourceLimitError(
                    f"prime number {count} lies beyond the sieve ceiling "
                    f"{self.ceiling} (raise PRIME_BAG_PRIME_CEILING)"
                )
            self.ensure_limit(min(2 * self._limit, self.ceiling))

    def nth(self, k: int) -> int:
        self.ensure_count(k)
        return self._primes[k - 1]

    def index_of(self, p: int) -> Optional[int]:
        """1-based index of ``p`` if it is a cached prime, else None."""
        self.ensure_limit(p + 1)
        i = bisect_left(self._primes, p)
        if i < len(self._primes) and self._primes[i] == p:
            return i + 1
        return None

    def is_cached_prime(self, n: int) -> bool:
        """Membership test; only meaningful for ``n < limit``."""
        i = bisect_left(self._primes, n)
        return i < len(self._primes) and self._primes[i] == n

    def next_after(self, p: int) -> Optional[int]:
        """Smallest cached prime greater than ``p``, or None if not cached yet."""
        i = bisect_right(self._primes, p)
        return self._primes[i] if i < len(self._primes) else None

    def below(self, bound: int) -> list[int]:
        """All primes below ``bound`` (which must not exceed ``limit``)."""
        return self._primes[: bisect_left(self._primes, bound)]


_table: Optional[PrimeTable] = None
_table_lock = threading.Lock()


def prime_table() -> PrimeTable:
    """The process-wide prime cache, rebuilt if the ceiling setting changed."""
    global _table
    ceiling = get_settings().prime_ceiling
    table = _table
    if table is None or table.ceiling != ceiling:
        with _table_lock:
            if _table is None or _table.ceiling != ceiling:
                _table = PrimeTable(ceiling)
            table = _table
    return table


# ---------------------------------------------------------------------------
# Primality
# ---------------------------------------------------------------------------


def _strong_probable_prime(
    n: int, base: int, d: int, s: int, tally: Optional[WorkTally] = None
) -> bool:
    # pow(base, d, n) squares once per bit of d.
    squarings = d.bit_length()
    x = pow(base, d, n)
    try:
        if x == 1 or x == n - 1:
            return True
        for _ in range(s - 1):
            x = x * x % n
            squarings += 1
            if x == n - 1:
                return True
        return False
    finally:
        if tally is not None:
            tally.modular_squarings += squarings


def is_prime_natural(n: int, *, tally: Optional[WorkTally] = None) -> bool:
    """True iff ``n`` is prime.

    Deterministic below 2**64; above, ``primality_rounds`` random bases drawn
    from a generator seeded with ``primality_seed`` bound the error by
    4**-rounds <= 2**-128.
    """
    if tally is not None:
        tally.primality_tests += 1
    if n < 2:
        return False
    table = prime_table()
    if n < table.limit:
        return table.is_cached_prime(n)
    for p in _DETERMINISTIC_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_strong_probable_prime(n, a, d, s, tally) for a in _DETERMINISTIC_BASES):
        return False
    if n < _DETERMINISTIC_LIMIT:
        return True
    settings = get_settings()
    rng = random.Random(settings.primality_seed)
    return all(
        _strong_probable_prime(n, rng.randrange(2, n - 1), d, s, tally)
        for _ in range(settings.primality_rounds)
    )


def _cheap_factor(n: int) -> Optional[int]:
    """Smallest prime factor of ``n`` among the cached small primes, if any."""
    table = prime_table()
    for p in table.below(min(table.limit, get_settings().trial_division_bound)):
        if p * p > n:
            break
        if n % p == 0:
            return p
    return None


def _require_prime(p: int) -> None:
    if not is_prime_natural(p):
        raise NotPrimeError(p, _cheap_factor(p) if p > 3 else None)


# ---------------------------------------------------------------------------
# Index <-> prime
# ---------------------------------------------------------------------------


def nth_prime(k: int) -> int:
    """The k-th prime, 1-based: nth_prime(1) == 2."""
    if k < 1:
        raise DomainError(f"prime index must be >= 1, got {k}")
    return prime_table().nth(k)


def prime_index(p: int) -> int:
    """Inverse of nth_prime: the k with nth_prime(k) == p."""
    _require_prime(p)
    index = prime_table().index_of(p)
    if index is None:  # pragma: no cover - sieve and Miller-Rabin disagree
        raise NotPrimeError(p)
    return index


def prime_successor(p: int) -> int:
    """The smallest prime strictly greater than the prime ``p``.

    Bertrand's postulate guarantees the result is below 2p.
    """
    _require_prime(p)
    table = prime_table()
    if p < table.limit:
        nxt = table.next_after(p)
        if nxt is not None:
            return nxt
        if table.limit < table.ceiling:
            table.ensure_limit(min(2 * p + 1, table.ceiling))
            nxt = table.next_after(p)
            if nxt is not None:
                return nxt
    candidate = p + 1 if p == 2 else p + 2
    while not is_prime_natural(candidate):
        candidate += 2
    return candidate


# ---------------------------------------------------------------------------
# Factoring
# ---------------------------------------------------------------------------


class _RhoBudget:
    def __init__(self, ceiling: int, tally: WorkTally) -> None:
        self.ceiling = ceiling
        self.tally = tally
        self.spent = 0

    def charge(self, steps: int) -> bool:
        self.spent += steps
        self.tally.rho_iterations += steps
        return self.spent <= self.ceiling


def _brent(n: int, rng: random.Random, budget: _RhoBudget) -> Optional[int]:
    """One Pollard-rho attempt with Brent cycle detection and batched gcds.

    Returns a factor in (1, n], n meaning the attempt failed, or None when
    the budget ran out.
    """
    c = rng.randrange(1, n)
    y = rng.randrange(0, n)
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        if not budget.charge(r):
            return None
        k = 0
        while k < r and g == 1:
            ys = y
            steps = min(_RHO_BATCH, r - k)
            for _ in range(steps):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            if not budget.charge(steps):
                return None
            g = gcd(q, n)
            k += _RHO_BATCH
        r *= 2
    if g == n:
        # The batch overshot: replay it one step at a time.
        while True:
            ys = (ys * ys + c) % n
            if not budget.charge(1):
                return None
            g = gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def factor_natural(n: int, *, tally: Optional[WorkTally] = None) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as {prime: exponent}.

    Trial division by cached primes below ``trial_division_bound``, then
    Pollard-Brent rho with recursive splitting; every cofactor is
    primality-tested. Exceeding ``work_ceiling`` rho steps raises
    ConversionTimeoutError carrying the partial factorization.
    """
    if n < 1:
        raise DomainError(f"cannot factor {n}: expected a natural number >= 1")
    settings = get_settings()
    tally = tally if tally is not None else WorkTally()
    factors: Counter[int] = Counter()
    table = prime_table()
    bound = min(settings.trial_division_bound, table.ceiling)
    table.ensure_limit(bound)
    for p in table.below(bound):
        if p * p > n:
            break
        tally.trial_divisions += 1
        while n % p == 0:
            factors[p] += 1
            n //= p
    if n == 1:
        return dict(factors)
    if n < bound * bound:
        factors[n] += 1
        return dict(factors)

    rng = random.Random(settings.rho_seed)
    budget = _RhoBudget(settings.work_ceiling, tally)
    pending = [n]
    while pending:
        m = pending.pop()
        if is_prime_natural(m, tally=tally):
            factors[m] += 1
            continue
        root = isqrt(m)
        if root * root == m:
            tally.factor_splits += 1
            pending.extend((root, root))
            continue
        d = m
        while d == m:
            d = _brent(m, rng, budget)
            if d is None:
                remaining = m
                for rest in pending:
                    remaining *= rest
                raise ConversionTimeoutError(
                    f"factoring stopped after {budget.spent} rho steps "
                    f"(work ceiling {budget.ceiling}); cofactor {m} unsplit",
                    partial=dict(factors),
                    remaining=remaining,
                )
            if d == m:
                logger.debug("rho attempt on %d failed, retrying with a new constant", m)
        tally.factor_splits += 1
        pending.extend((d, m // d))
    return dict(factors)
