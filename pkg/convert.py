"""The expensive bridge between prime bags and positional numbers.

Multiplying PBs is cheap bag arithmetic; getting a PB out of a positional
integer means factoring it. Every conversion can fill a
``ConversionReceipt`` so callers see what the bridge cost, which is how
addition (defined here only via conversion) shows its price.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Optional, Union

from errors import DomainError, IrrationalityError
from pbnum import ZERO, PrimeBag, format_pb, mul, power
from primes import WorkTally, factor_natural, nth_prime, prime_index, prime_table

logger = logging.getLogger(__name__)

# Exact rationals are Python Fractions: always reduced, denominator >= 1.
ExactRational = Fraction


@dataclass
class ConversionReceipt:
    """Work spent on one or more conversions.

    ``input_size`` is the digit count of positional inputs plus the entry
    count of PB inputs; ``evaluation_steps`` counts prime powers multiplied
    out while evaluating PBs. All counters only grow.
    """

    input_size: int = 0
    work: WorkTally = field(default_factory=WorkTally)
    evaluation_steps: int = 0
    conversions: int = 0
    result: str = ""

    @property
    def total(self) -> int:
        return self.work.total + self.evaluation_steps

    def as_dict(self) -> dict[str, Any]:
        return {
            "input_size": self.input_size,
            "conversions": self.conversions,
            "trial_divisions": self.work.trial_divisions,
            "primality_tests": self.work.primality_tests,
            "rho_iterations": self.work.rho_iterations,
            "factor_splits": self.work.factor_splits,
            "evaluation_steps": self.evaluation_steps,
            "total": self.total,
            "result": self.result,
        }


def _digits(n: int) -> int:
    return len(str(abs(n)))


def _factor_to_entries(n: int, receipt: ConversionReceipt) -> dict[int, int]:
    return {prime_index(p): e for p, e in factor_natural(n, tally=receipt.work).items()}


def natural_to_pb(
    n: int, receipt: Optional[ConversionReceipt] = None
) -> tuple[PrimeBag, ConversionReceipt]:
    """Factor ``n >= 1`` into its natural PB; returns the PB and the receipt."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"expected a natural number, got {n!r}")
    if n == 0:
        raise DomainError("0 is not a natural PB; rational_to_pb(0) gives the Zero symbol")
    if n < 0:
        raise DomainError(f"{n} is negative; use rational_to_pb for signed values")
    receipt = receipt if receipt is not None else ConversionReceipt()
    receipt.input_size += _digits(n)
    receipt.conversions += 1
    bag = PrimeBag.from_entries(_factor_to_entries(n, receipt))
    receipt.result = format_pb(bag)
    logger.debug("natural_to_pb(%d) = %s, work %d", n, receipt.result, receipt.work.total)
    return bag, receipt


def _as_rational(q: Union[int, str, Fraction]) -> Fraction:
    if isinstance(q, bool):
        raise DomainError(f"expected a rational number, got {q!r}")
    try:
        return Fraction(q)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise DomainError(f"not an exact rational: {q!r}") from exc


def rational_to_pb(
    q: Union[int, str, Fraction], receipt: Optional[ConversionReceipt] = None
) -> PrimeBag:
    """Factor numerator and denominator; denominator primes get negative multiplicities."""
    value = _as_rational(q)
    receipt = receipt if receipt is not None else ConversionReceipt()
    receipt.conversions += 1
    if value == 0:
        receipt.result = "0"
        return ZERO
    num, den = abs(value.numerator), value.denominator
    receipt.input_size += _digits(num) + (_digits(den) if den != 1 else 0)
    entries = _factor_to_entries(num, receipt)
    for k, e in _factor_to_entries(den, receipt).items():
        entries[k] = -e
    bag = PrimeBag.from_entries(entries, sign=1 if value > 0 else -1)
    receipt.result = format_pb(bag)
    logger.debug("rational_to_pb(%s) = %s, work %d", value, receipt.result, receipt.work.total)
    return bag


def pb_to_rational(a: PrimeBag, receipt: Optional[ConversionReceipt] = None) -> Fraction:
    """Exact value of a real PB with integer multiplicities."""
    if a.is_zero:
        return Fraction(0)
    if a.is_infinity:
        raise DomainError("inf has no rational value")
    if a.is_imaginary:
        raise DomainError(f"{format_pb(a)} is imaginary and has no rational value")
    for k, m in a.entries:
        if m.denominator != 1:
            raise IrrationalityError(k)
    num = prod(nth_prime(k) ** m.numerator for k, m in a.entries if m > 0)
    den = prod(nth_prime(k) ** -m.numerator for k, m in a.entries if m < 0)
    if receipt is not None:
        receipt.input_size += len(a.entries)
        receipt.evaluation_steps += len(a.entries)
        receipt.conversions += 1
    # Distinct primes: already in lowest terms.
    return Fraction(a.sign * num, den)


def add(a: PrimeBag, b: PrimeBag, receipt: Optional[ConversionReceipt] = None) -> PrimeBag:
    """a + b, only by evaluating both, adding, and factoring the sum."""
    total = pb_to_rational(a, receipt) + pb_to_rational(b, receipt)
    return rational_to_pb(total, receipt)


def sub(a: PrimeBag, b: PrimeBag, receipt: Optional[ConversionReceipt] = None) -> PrimeBag:
    """a - b via conversion; x - x is the Zero symbol."""
    difference = pb_to_rational(a, receipt) - pb_to_rational(b, receipt)
    return rational_to_pb(difference, receipt)


def euler_pi_squared(count: int) -> Fraction:
    """Truncated Euler product 6 * prod(p**2 / (p**2 - 1)) over the first primes.

    The numerator is built as a PB (the primorial squared times {2,1}) and
    evaluated once; the denominator is the product of p**2 - 1.
    """
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise DomainError(f"the product needs at least one prime, got {count!r}")
    prime_table().ensure_count(count)
    primorial = PrimeBag.from_entries({k: 1 for k in range(1, count + 1)})
    six = PrimeBag.from_entries({2: 1, 1: 1})
    numerator = pb_to_rational(mul(power(primorial, 2), six)).numerator
    denominator = prod(nth_prime(k) ** 2 - 1 for k in range(1, count + 1))
    return Fraction(numerator, denominator)


def value_or_none(a: PrimeBag) -> Optional[Fraction]:
    """Exact value when one exists (rational PBs), else None."""
    try:
        return pb_to_rational(a)
    except DomainError:
        return None


def convert_receipt_for(a: PrimeBag) -> ConversionReceipt:
    """Receipt for evaluating ``a`` to positional form."""
    receipt = ConversionReceipt()
    value = pb_to_rational(a, receipt)
    receipt.result = str(value)
    return receipt
