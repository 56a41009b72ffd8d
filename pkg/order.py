"""Ordering prime bags.

``partial_compare`` only uses structural rules that are cheap on bags
(sub-bag domination and the "double beats the next prime" rule) and says
Incomparable when they do not apply. ``exact_compare`` always answers, by
enclosing the log of the quotient in an interval at increasing precision
and, if the ladder runs out, by exact integer comparison.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm, prod

import mpmath
from mpmath import iv

from errors import DomainError
from pbnum import PrimeBag, apply_rule2, div, format_pb, is_natural, require_natural
from primes import nth_prime
from settings import get_settings

logger = logging.getLogger(__name__)

# iv.prec is process-global state.
_iv_lock = threading.Lock()


class OrderResult(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> "OrderResult":
        if self is OrderResult.LESS:
            return OrderResult.GREATER
        if self is OrderResult.GREATER:
            return OrderResult.LESS
        return self

    @property
    def symbol(self) -> str:
        return {"less": "<", "equal": "=", "greater": ">", "incomparable": "?"}[self.value]


# ---------------------------------------------------------------------------
# Cheap partial order
# ---------------------------------------------------------------------------


def increment_member(a: PrimeBag, k: int) -> PrimeBag:
    """Replace one member k by k + 1 (Rule 2 applied to that member)."""
    return apply_rule2(a, k)


def _dominates(small: PrimeBag, large: PrimeBag) -> bool:
    lm = large.multiplicities
    return all(m <= lm.get(k, 0) for k, m in small.entries)


def _doubled_beats_increment(x: PrimeBag, y: PrimeBag) -> bool:
    """True when x = c*{1} and y = c with one member k moved to k + 1.

    Then y/x = p(k+1) / (2 p(k)) < 1 by Bertrand's postulate.
    """
    xm, ym = x.multiplicities, y.multiplicities
    diff = {}
    for k in set(xm) | set(ym):
        d = ym.get(k, 0) - xm.get(k, 0)
        if d:
            diff[k] = d
    if diff == {2: 1, 1: -2}:
        return True
    raised = [k for k, d in diff.items() if d == 1]
    if len(raised) != 1 or len(diff) != 3:
        return False
    k = raised[0] - 1
    return k > 1 and diff.get(k) == -1 and diff.get(1) == -1


def partial_compare(a: PrimeBag, b: PrimeBag) -> OrderResult:
    """Sound but incomplete comparison of natural PBs using bag structure only."""
    require_natural("partial_compare", a, b)
    if a == b:
        return OrderResult.EQUAL
    if _dominates(a, b):
        return OrderResult.LESS
    if _dominates(b, a):
        return OrderResult.GREATER
    if _doubled_beats_increment(a, b):
        return OrderResult.GREATER
    if _doubled_beats_increment(b, a):
        return OrderResult.LESS
    return OrderResult.INCOMPARABLE


# ---------------------------------------------------------------------------
# Log enclosures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogEnclosure:
    """Closed interval [lower, upper] containing ln(value).

    Zero encloses as [-inf, -inf] and Infinity as [+inf, +inf].
    """

    lower: mpmath.mpf
    upper: mpmath.mpf
    precision: int

    @property
    def width(self) -> mpmath.mpf:
        if mpmath.isinf(self.lower) or mpmath.isinf(self.upper):
            return mpmath.mpf(0)
        return mpmath.fsub(self.upper, self.lower, exact=True)

    @property
    def midpoint(self) -> mpmath.mpf:
        if mpmath.isinf(self.lower):
            return self.lower
        return mpmath.ldexp(mpmath.fadd(self.lower, self.upper, exact=True), -1)

    def __contains__(self, x: object) -> bool:
        return self.lower <= mpmath.mpf(x) <= self.upper

    def sign(self) -> int:
        """+1 or -1 when the enclosure excludes 0, else 0 (undecided)."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return 0


def _entries_enclosure(entries: tuple[tuple[int, Fraction], ...], precision: int) -> LogEnclosure:
    with _iv_lock:
        saved = iv.prec
        iv.prec = precision
        try:
            total = iv.mpf(0)
            for k, m in entries:
                total += iv.mpf(m.numerator) / m.denominator * iv.ln(nth_prime(k))
            lower, upper = total._mpi_
        finally:
            iv.prec = saved
    return LogEnclosure(mpmath.mp.make_mpf(lower), mpmath.mp.make_mpf(upper), precision)


def log_value(a: PrimeBag, precision: int = 64) -> LogEnclosure:
    """Rigorous enclosure of ln(a) for a positive real PB.

    The width is at most 2**(1 - precision) * max(1, |midpoint|); the
    working precision doubles until that holds.
    """
    if a.is_zero:
        return LogEnclosure(mpmath.mpf("-inf"), mpmath.mpf("-inf"), precision)
    if a.is_infinity:
        return LogEnclosure(mpmath.mpf("inf"), mpmath.mpf("inf"), precision)
    if a.is_imaginary or a.sign < 0:
        raise DomainError(f"ln is only taken of positive real PBs, got {format_pb(a)}")
    working = precision + 2 * max(1, len(a.entries)).bit_length() + 8
    tolerance = mpmath.ldexp(1, 1 - precision)
    while True:
        enclosure = _entries_enclosure(a.entries, working)
        if enclosure.width <= tolerance * max(1, abs(enclosure.midpoint)):
            return LogEnclosure(enclosure.lower, enclosure.upper, precision)
        working *= 2


# ---------------------------------------------------------------------------
# Exact total order
# ---------------------------------------------------------------------------


def _require_positive_real(a: PrimeBag) -> None:
    if a.is_imaginary:
        raise DomainError(f"imaginary PBs have no order: {format_pb(a)}")
    if not a.is_finite or a.sign < 0:
        raise DomainError(
            f"exact_compare takes finite positive PBs, got {format_pb(a)}; "
            f"use signed_compare for signs, 0 and inf"
        )


def _exact_sign(quotient: PrimeBag) -> int:
    """Sign of ln(quotient) by integer arithmetic.

    Fractional multiplicities are cleared by raising to the lcm of their
    denominators, which preserves order on positive reals.
    """
    scale = lcm(*(m.denominator for _, m in quotient.entries))
    up = prod(nth_prime(k) ** int(m * scale) for k, m in quotient.entries if m > 0)
    down = prod(nth_prime(k) ** int(-m * scale) for k, m in quotient.entries if m < 0)
    return (up > down) - (up < down)


def exact_compare(a: PrimeBag, b: PrimeBag) -> OrderResult:
    """Total order on finite positive real PBs; never Incomparable."""
    _require_positive_real(a)
    _require_positive_real(b)
    if a == b:
        return OrderResult.EQUAL
    quotient = div(a, b)
    settings = get_settings()
    precision = settings.ladder_start_bits
    while precision <= settings.ladder_cap_bits:
        sign = _entries_enclosure(quotient.entries, precision).sign()
        if sign:
            return OrderResult.GREATER if sign > 0 else OrderResult.LESS
        logger.debug("enclosure of ln(%s) contains 0 at %d bits", format_pb(quotient), precision)
        precision *= 2
    logger.info(
        "precision ladder exhausted at %d bits; comparing %s exactly",
        settings.ladder_cap_bits,
        format_pb(quotient),
    )
    return OrderResult.GREATER if _exact_sign(quotient) > 0 else OrderResult.LESS


def _signed_rank(a: PrimeBag) -> int:
    if a.is_zero:
        return 1
    if a.is_infinity:
        return 3
    return 0 if a.sign < 0 else 2


def signed_compare(a: PrimeBag, b: PrimeBag) -> OrderResult:
    """negatives < 0 < positives < inf; two negatives compare reversed."""
    if a.is_imaginary or b.is_imaginary:
        raise DomainError("imaginary PBs have no order")
    ra, rb = _signed_rank(a), _signed_rank(b)
    if ra != rb:
        return OrderResult.LESS if ra < rb else OrderResult.GREATER
    if ra in (1, 3):
        return OrderResult.EQUAL
    if ra == 2:
        return exact_compare(a, b)
    return exact_compare(-a, -b).flipped()


def compare(a: PrimeBag, b: PrimeBag) -> tuple[OrderResult, OrderResult]:
    """Both orderings; partial is Incomparable unless both PBs are natural."""
    partial = partial_compare(a, b) if is_natural(a) and is_natural(b) else OrderResult.INCOMPARABLE
    return partial, signed_compare(a, b)
