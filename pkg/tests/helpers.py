"""Brute-force oracles and generators shared by the prime-bag tests.

Kept apart from conftest.py so test modules can import them directly.
Everything here is deliberately naive: trial division, a plain sieve and
Fraction arithmetic are what the library is checked against.
"""

from fractions import Fraction
from typing import Optional

from hypothesis import strategies as st

from pbnum import PrimeBag


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def sieve(limit: int) -> list[int]:
    """All primes below ``limit`` by the sieve of Eratosthenes."""
    flags = [True] * limit
    flags[0] = flags[1] = False
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            for j in range(i * i, limit, i):
                flags[j] = False
    return [i for i, f in enumerate(flags) if f]


PRIMES = sieve(10**6 + 1)
INDEX = {p: k for k, p in enumerate(PRIMES, start=1)}


def trial_factor(n: int) -> dict[int, int]:
    """{prime: exponent} of ``n >= 1`` by trial division."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def value_of(a: PrimeBag) -> Fraction:
    """Value of a real PB with integer multiplicities, from the oracle prime list."""
    value = Fraction(a.sign)
    for k, m in a.entries:
        value *= Fraction(PRIMES[k - 1]) ** int(m)
    return value


def bag_from_value(q: Fraction) -> PrimeBag:
    """Oracle-side PB of a non-zero rational via trial division."""
    q = Fraction(q)
    entries = {INDEX[p]: e for p, e in trial_factor(abs(q.numerator)).items()}
    for p, e in trial_factor(q.denominator).items():
        entries[INDEX[p]] = -e
    return PrimeBag.from_entries(entries, sign=1 if q > 0 else -1)


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------

def natural_bags(max_index: int = 12, max_mult: int = 4, max_entries: Optional[int] = 4):
    """Natural PBs with small indices and multiplicities."""
    return st.dictionaries(
        st.integers(1, max_index), st.integers(1, max_mult), max_size=max_entries
    ).map(PrimeBag.from_entries)


def rational_bags(max_index: int = 12, max_mult: int = 3):
    """Rational PBs: signed integer multiplicities and either sign."""
    mults = st.integers(-max_mult, max_mult).filter(bool)
    return st.builds(
        lambda entries, sign: PrimeBag.from_entries(entries, sign=sign),
        st.dictionaries(st.integers(1, max_index), mults, max_size=4),
        st.sampled_from([1, -1]),
    )


def positive_fractions(limit: int = 10**6):
    return st.builds(Fraction, st.integers(1, limit), st.integers(1, limit))
