"""Two bag representations of the naturals that give up uniqueness.

DecBag: members are exponents e, each worth 10**e, summed. Addition is the
bag union and needs no carrying; ten copies of e and one e + 1 are the same
number. MulBag: members are integers >= 2, multiplied. Multiplication is
the bag union; {4,2} and {2,2,2} are both 8, and factoring every member
recovers the unique (prime bag) form.
"""

from __future__ import annotations

import heapq
import re
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from math import prod

from errors import DomainError, LiteralParseError, ResourceLimitError
from pbnum import PrimeBag, require_natural
from primes import factor_natural, nth_prime, prime_index
from settings import get_settings

_MEMBER_RE = re.compile(r"\s*(\d+)(?:\s*[:x]\s*(\d+))?\s*")


def _parse_members(text: str, what: str) -> list[int]:
    """Brace list of decimal members; ``e:c`` (or ``e x c``) repeats e c times."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise LiteralParseError(f"{what} literal must be wrapped in braces", text=text, position=0)
    inner = body[1:-1]
    if not inner.strip():
        return []
    members: list[int] = []
    offset = text.index("{") + 1
    for chunk in inner.split(","):
        match = _MEMBER_RE.fullmatch(chunk)
        if match is None:
            raise LiteralParseError(f"bad {what} member {chunk.strip()!r}", text=text, position=offset)
        count = int(match.group(2)) if match.group(2) is not None else 1
        if count == 0:
            raise LiteralParseError("zero repeat count", text=text, position=offset)
        members.extend([int(match.group(1))] * count)
        offset += len(chunk) + 1
    return members


def _format_members(members: Iterable[int]) -> str:
    return "{" + ",".join(str(m) for m in members) + "}"


# ---------------------------------------------------------------------------
# DecBag
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecBag:
    """Multiset of powers of ten, stored as exponents in decreasing order."""

    members: tuple[int, ...] = ()

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "DecBag":
        items = list(members)
        for e in items:
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise DomainError(f"DecBag exponents are integers >= 0, got {e!r}")
        return cls(tuple(sorted(items, reverse=True)))

    @classmethod
    def from_counts(cls, counts: Counter[int]) -> "DecBag":
        return cls.from_members(counts.elements())

    @classmethod
    def from_int(cls, n: int) -> "DecBag":
        """The normal form of ``n``: one exponent copy per unit of each digit."""
        if n < 0:
            raise DomainError(f"DecBags hold naturals only, got {n}")
        digits = str(n)[::-1]
        return cls.from_members(
            e for e, d in enumerate(digits) for _ in range(int(d))
        )

    @classmethod
    def parse(cls, text: str) -> "DecBag":
        return cls.from_members(_parse_members(text, "DecBag"))

    def counts(self) -> Counter[int]:
        return Counter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return _format_members(self.members)


def decbag_value(a: DecBag) -> int:
    return sum(10**e for e in a.members)


def decbag_add(a: DecBag, b: DecBag) -> DecBag:
    """Bag union; no carrying needed."""
    return DecBag.from_members(a.members + b.members)


def decbag_mul(a: DecBag, b: DecBag) -> DecBag:
    """Distribute: every pair of members contributes 10**(e1 + e2)."""
    return DecBag.from_members(e1 + e2 for e1 in a.members for e2 in b.members)


def decbag_normalize(a: DecBag) -> DecBag:
    """Carry every ten copies of e into one e + 1 until no exponent repeats ten times."""
    counts = a.counts()
    heap = list(counts)
    heapq.heapify(heap)
    digits: Counter[int] = Counter()
    while heap:
        e = heapq.heappop(heap)
        carry, digit = divmod(counts.pop(e, 0), 10)
        if digit:
            digits[e] = digit
        if carry:
            if e + 1 not in counts:
                heapq.heappush(heap, e + 1)
            counts[e + 1] += carry
    return DecBag.from_counts(digits)


def decbag_sub(a: DecBag, b: DecBag) -> DecBag:
    """Bag difference, borrowing from higher exponents where a member is missing.

    A borrow turns one 10**f into nine copies of every exponent strictly
    between e and f plus ten copies of e.
    """
    if decbag_value(a) < decbag_value(b):
        raise DomainError(
            f"DecBag subtraction would go negative: {decbag_value(a)} - {decbag_value(b)}"
        )
    have = decbag_normalize(a).counts()
    need = decbag_normalize(b).counts()
    for e in sorted(need):
        while have[e] < need[e]:
            f = min(x for x, c in have.items() if x > e and c > 0)
            have[f] -= 1
            for g in range(e + 1, f):
                have[g] += 9
            have[e] += 10
        have[e] -= need[e]
    return DecBag.from_counts(+have)


# ---------------------------------------------------------------------------
# MulBag
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MulBag:
    """Multiset of integers >= 2, multiplied; stored in decreasing order."""

    members: tuple[int, ...] = ()

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "MulBag":
        cap = get_settings().mulbag_member_cap
        items = list(members)
        for m in items:
            if isinstance(m, bool) or not isinstance(m, int) or m < 2:
                raise DomainError(f"MulBag members are integers >= 2, got {m!r}")
            if m > cap:
                raise ResourceLimitError(f"MulBag member {m} exceeds the member cap {cap}")
        return cls(tuple(sorted(items, reverse=True)))

    @classmethod
    def from_int(cls, n: int) -> "MulBag":
        """The one-member bag {n}; the empty bag for 1."""
        if n < 1:
            raise DomainError(f"MulBags hold naturals >= 1, got {n}")
        return cls.from_members([n] if n > 1 else [])

    @classmethod
    def parse(cls, text: str) -> "MulBag":
        return cls.from_members(_parse_members(text, "MulBag"))

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return _format_members(self.members)


def mulbag_value(a: MulBag) -> int:
    return prod(a.members)


def mulbag_mul(a: MulBag, b: MulBag) -> MulBag:
    return MulBag.from_members(a.members + b.members)


def mulbag_to_pb(a: MulBag) -> PrimeBag:
    """Factor every (small) member and accumulate prime indices."""
    counts: Counter[int] = Counter()
    for member in a.members:
        for p, e in factor_natural(member).items():
            counts[prime_index(p)] += e
    return PrimeBag.from_entries(counts)


def mulbag_from_pb(a: PrimeBag) -> MulBag:
    """The all-prime MulBag of a natural PB."""
    require_natural("MulBag conversion", a)
    return MulBag.from_members(
        nth_prime(k) for k, m in a.entries for _ in range(m.numerator)
    )


def mulbag_normalize(a: MulBag) -> MulBag:
    """All-prime normal form: two MulBags are equal in value iff these agree."""
    return mulbag_from_pb(mulbag_to_pb(a))

