"""The prime-bag (PB) number type and its bag-operator arithmetic.

A PrimeBag denotes ``sign * i**[unit is imaginary] * prod(nth_prime(k) ** m_k)``
where each multiplicity ``m_k`` is an exact, non-zero rational. Two special
values sit outside that product: Zero (written ``0``, the bag ``{-inf}``)
and Infinity (``inf``). Multiplication is the multiplicity-wise sum (bag
additive union), division the difference, exponentiation scaling, gcd the
intersection (min) and lcm the max.

Literals come in two grammars. Index form lists prime indices, repeated
to express multiplicity, ``-k`` for a reciprocal member and ``k:a/b`` for
any other multiplicity::

    {2,1,1}     12
    {2,1,-3}    6/5
    {1:1/2}     sqrt(2)
    -i{1}       -2i

Bracket form spells every member as a tower of braces whose depth is the
prime index, exactly as Rules 0-2 generate them: ``{{{}},{}}`` is 6.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Union

from errors import (
    DomainError,
    IrrationalityError,
    LiteralParseError,
    ModeError,
    UndefinedFormError,
)

logger = logging.getLogger(__name__)

Multiplicity = Fraction
RationalLike = Union[int, Fraction, str]

# Integer multiplicities up to this size print as repeated members.
REPEAT_LIMIT = 8


class Special(str, Enum):
    """Finite bag, or one of the two symbols added to close the field."""
    FINITE = "finite"
    ZERO = "0"
    INFINITY = "inf"


class Unit(str, Enum):
    REAL = "real"
    IMAGINARY = "imaginary"


class NumberClass(str, Enum):
    """Which number system a PB belongs to; gates operation domains."""
    NATURAL = "natural"
    RATIONAL = "rational"
    EXTENDED = "extended"


class DivMode(str, Enum):
    NATURAL_TRUNCATED = "natural-truncated"
    EXACT = "exact"


# ---------------------------------------------------------------------------
# Value type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeBag:
    """Immutable, canonical prime bag.

    ``entries`` holds (prime index, multiplicity) pairs with non-zero
    multiplicities, indices strictly decreasing. Build instances through
    ``from_entries``/``from_members``/``validate`` rather than directly.
    """

    entries: tuple[tuple[int, Fraction], ...] = ()
    sign: int = 1
    unit: Unit = Unit.REAL
    special: Special = Special.FINITE

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.special is not Special.FINITE and (
            self.entries or self.sign != 1 or self.unit is not Unit.REAL
        ):
            raise ValueError("zero and infinity carry no entries, sign or unit")
        previous = None
        for k, m in self.entries:
            if previous is not None and k >= previous:
                raise ValueError("entries must have strictly decreasing indices")
            if k < 1 or m == 0:
                raise ValueError(f"invalid entry ({k}, {m})")
            previous = k

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_entries(
        cls,
        entries: Union[Mapping[int, RationalLike], Iterable[tuple[int, RationalLike]]],
        *,
        sign: int = 1,
        unit: Unit = Unit.REAL,
    ) -> "PrimeBag":
        """Normalize (index, multiplicity) pairs; repeated indices accumulate."""
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[int, Fraction] = {}
        for k, m in pairs:
            if isinstance(k, bool) or not isinstance(k, int) or k < 1:
                raise DomainError(f"prime index must be an integer >= 1, got {k!r}")
            acc[k] = acc.get(k, Fraction(0)) + Fraction(m)
        normalized = tuple(
            (k, m) for k, m in sorted(acc.items(), reverse=True) if m != 0
        )
        return cls(normalized, sign, unit, Special.FINITE)

    @classmethod
    def from_members(cls, members: Iterable[int], *, sign: int = 1) -> "PrimeBag":
        """Bag from a member list in the source's notation: -k is a reciprocal."""
        counts: Counter[int] = Counter()
        for member in members:
            if member == 0:
                raise DomainError("0 is not a prime index")
            counts[abs(member)] += 1 if member > 0 else -1
        return cls.from_entries(counts, sign=sign)

    @classmethod
    def prime(cls, k: int) -> "PrimeBag":
        """The singleton bag {k}: the k-th prime."""
        return cls.from_entries({k: 1})

    # -- queries ------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.special is Special.FINITE

    @property
    def is_zero(self) -> bool:
        return self.special is Special.ZERO

    @property
    def is_infinity(self) -> bool:
        return self.special is Special.INFINITY

    @property
    def is_imaginary(self) -> bool:
        return self.unit is Unit.IMAGINARY

    @cached_property
    def multiplicities(self) -> dict[int, Fraction]:
        return dict(self.entries)

    @property
    def number_class(self) -> NumberClass:
        return classify(self)

    # -- operator sugar -----------------------------------------------------

    def __mul__(self, other: "PrimeBag") -> "PrimeBag":
        if not isinstance(other, PrimeBag):
            return NotImplemented
        return mul(self, other)

    def __truediv__(self, other: "PrimeBag") -> "PrimeBag":
        if not isinstance(other, PrimeBag):
            return NotImplemented
        return div(self, other)

    def __pow__(self, q: RationalLike) -> "PrimeBag":
        return power(self, q)

    def __neg__(self) -> "PrimeBag":
        return negate(self)

    def __str__(self) -> str:
        return format_pb(self)

    def __repr__(self) -> str:
        return f"PrimeBag({format_pb(self)!r})"


ONE = PrimeBag()
ZERO = PrimeBag(special=Special.ZERO)
INFINITY = PrimeBag(special=Special.INFINITY)
TWO = PrimeBag.prime(1)


def classify(a: PrimeBag) -> NumberClass:
    """Natural, rational or extended; total and deterministic."""
    if a.is_zero:
        return NumberClass.RATIONAL
    if a.is_infinity or a.is_imaginary:
        return NumberClass.EXTENDED
    if any(m.denominator != 1 for _, m in a.entries):
        return NumberClass.EXTENDED
    if a.sign == 1 and all(m > 0 for _, m in a.entries):
        return NumberClass.NATURAL
    return NumberClass.RATIONAL


def is_natural(a: PrimeBag) -> bool:
    return classify(a) is NumberClass.NATURAL


def require_natural(op: str, *bags: PrimeBag) -> None:
    for bag in bags:
        if not is_natural(bag):
            raise ModeError(
                f"{op} is defined for natural PBs only; {format_pb(bag)} is "
                f"{classify(bag).value}"
            )


def _require_finite(op: str, a: PrimeBag) -> None:
    if not a.is_finite:
        raise DomainError(f"{op} needs a finite PB, got {format_pb(a)}")


# ---------------------------------------------------------------------------
# Bag operators
# ---------------------------------------------------------------------------


def mul(a: PrimeBag, b: PrimeBag) -> PrimeBag:
    """Bag additive union, with the sign and imaginary-unit rules.

    Primes and their reciprocals cancel; 0 and inf absorb; 0 * inf is an error.
    """
    if (a.is_zero and b.is_infinity) or (a.is_infinity and b.is_zero):
        raise UndefinedFormError("0 * inf is undefined")
    if a.is_zero or b.is_zero:
        return ZERO
    if a.is_infinity or b.is_infinity:
        return INFINITY
    merged = dict(a.entries)
    for k, m in b.entries:
        merged[k] = merged.get(k, Fraction(0)) + m
    sign = a.sign * b.sign
    if a.is_imaginary and b.is_imaginary:
        sign = -sign  # i * i = -1
    unit = Unit.IMAGINARY if a.is_imaginary != b.is_imaginary else Unit.REAL
    return PrimeBag.from_entries(merged, sign=sign, unit=unit)


def reciprocal(a: PrimeBag) -> PrimeBag:
    """Negate every multiplicity; 1/(i x) = -i/x; 0 and inf swap."""
    if a.is_zero:
        return INFINITY
    if a.is_infinity:
        return ZERO
    sign = -a.sign if a.is_imaginary else a.sign
    return PrimeBag(tuple((k, -m) for k, m in a.entries), sign, a.unit)


def negate(a: PrimeBag) -> PrimeBag:
    """Bag-level negative sign; 0 and inf are unsigned."""
    if not a.is_finite:
        return a
    return PrimeBag(a.entries, -a.sign, a.unit)


class TruncatedQuotient(NamedTuple):
    """Zero-truncated bag difference and what the divisor had left over."""

    quotient: PrimeBag
    shortfall: PrimeBag

    @property
    def exact(self) -> bool:
        return self.shortfall == ONE


def truncated_quotient(a: PrimeBag, b: PrimeBag) -> TruncatedQuotient:
    """Natural-number bag difference: each multiplicity is max(0, a_k - b_k).

    ``shortfall`` collects the divisor members ``a`` could not supply; it is
    the empty bag exactly when b divides a.
    """
    require_natural("truncated division", a, b)
    am, bm = a.multiplicities, b.multiplicities
    quotient = {k: max(Fraction(0), m - bm.get(k, 0)) for k, m in a.entries}
    shortfall = {k: max(Fraction(0), m - am.get(k, 0)) for k, m in b.entries}
    return TruncatedQuotient(
        PrimeBag.from_entries(quotient), PrimeBag.from_entries(shortfall)
    )


def div(a: PrimeBag, b: PrimeBag, mode: DivMode = DivMode.EXACT) -> PrimeBag:
    """Bag difference.

    EXACT: a * reciprocal(b), the proper inverse of mul. NATURAL_TRUNCATED:
    zero-truncated difference of natural PBs (see truncated_quotient for the
    non-divisibility report).
    """
    if mode is DivMode.NATURAL_TRUNCATED:
        result = truncated_quotient(a, b)
        if not result.exact:
            logger.info(
                "%s does not divide %s; truncated members %s",
                format_pb(b),
                format_pb(a),
                format_pb(result.shortfall),
            )
        return result.quotient
    if b.is_zero:
        raise UndefinedFormError("division by zero")
    if a.is_infinity and b.is_infinity:
        raise UndefinedFormError("inf / inf is undefined")
    return mul(a, reciprocal(b))


def gcd(a: PrimeBag, b: PrimeBag) -> PrimeBag:
    """Bag intersection: multiplicity-wise minimum of natural PBs."""
    require_natural("gcd", a, b)
    bm = b.multiplicities
    return PrimeBag.from_entries(
        {k: min(m, bm[k]) for k, m in a.entries if k in bm}
    )


def lcm(a: PrimeBag, b: PrimeBag) -> PrimeBag:
    """Multiplicity-wise maximum of natural PBs."""
    require_natural("lcm", a, b)
    merged = dict(a.entries)
    for k, m in b.entries:
        merged[k] = max(merged.get(k, Fraction(0)), m)
    return PrimeBag.from_entries(merged)


def power(a: PrimeBag, q: RationalLike, *, natural_output: bool = False) -> PrimeBag:
    """Bag scaling by the rational ``q``; fractional ``q`` takes roots.

    With ``natural_output`` every resulting multiplicity must be an integer:
    {1}^(1/2) has no integer split, which is why sqrt(2) is irrational.
    """
    _require_finite("exponentiation", a)
    q = Fraction(q)
    if q == 0:
        return ONE
    if q.denominator != 1 and (a.sign < 0 or a.is_imaginary):
        raise DomainError(
            f"fractional exponent {q} of {format_pb(a)}: roots of negative or "
            f"imaginary PBs are not defined"
        )
    scaled = [(k, m * q) for k, m in a.entries]
    if natural_output:
        for k, m in scaled:
            if m.denominator != 1:
                raise IrrationalityError(
                    k,
                    f"{format_pb(a)}^({q}) needs multiplicity {m} for prime "
                    f"index {k}: no integer split exists, the result is irrational",
                )
    sign, unit = 1, Unit.REAL
    if q.denominator == 1:
        n = q.numerator
        if a.sign < 0 and n % 2:
            sign = -1
        if a.is_imaginary:
            turn = n % 4  # i**n cycles with period 4
            if turn in (2, 3):
                sign = -sign
            if turn in (1, 3):
                unit = Unit.IMAGINARY
    return PrimeBag(tuple(scaled), sign, unit)


def is_prime_pb(a: PrimeBag) -> bool:
    """A natural PB is prime iff it holds exactly one member once."""
    require_natural("is_prime", a)
    return len(a.entries) == 1 and a.entries[0][1] == 1


def factor_pb(a: PrimeBag) -> list[tuple[int, int]]:
    """The factors of a natural PB are its members: [(index, multiplicity)]."""
    require_natural("factor", a)
    return [(k, m.numerator) for k, m in a.entries]


def multiplicity_of(a: PrimeBag, k: int) -> Fraction:
    """``a # k``; zero for indices that are not members."""
    _require_finite("multiplicity", a)
    return a.multiplicities.get(k, Fraction(0))


def bag_member_count(a: PrimeBag) -> int:
    """Number of members.

    Natural PBs count every copy (sum of multiplicities); any other finite PB
    counts distinct entries, since signed and fractional multiplicities have
    no member-count reading.
    """
    _require_finite("member count", a)
    if is_natural(a):
        return sum(m.numerator for _, m in a.entries)
    return len(a.entries)


# ---------------------------------------------------------------------------
# Generative rules
# ---------------------------------------------------------------------------


def apply_rule1(a: PrimeBag) -> PrimeBag:
    """Rule 1: add the empty bag as a member, i.e. multiply by 2."""
    require_natural("Rule 1", a)
    return mul(a, TWO)


def apply_rule2(a: PrimeBag, k: int) -> PrimeBag:
    """Rule 2: wrap one member k in a bag, i.e. replace p_k by p_(k+1)."""
    require_natural("Rule 2", a)
    if k not in a.multiplicities:
        raise DomainError(f"{k} is not a member of {format_pb(a)}")
    return PrimeBag.from_entries(list(a.entries) + [(k, -1), (k + 1, 1)])


# ---------------------------------------------------------------------------
# Bracket trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BracketTree:
    """A pure bag of bags: the nested-brace form before interpretation."""

    children: tuple["BracketTree", ...] = field(default=())

    @classmethod
    def tower(cls, depth: int) -> "BracketTree":
        """``depth`` nested brace pairs: the member denoting prime index depth."""
        node = cls()
        for _ in range(depth - 1):
            node = cls((node,))
        return node

    def tower_depth(self) -> Optional[int]:
        """Depth if this node is a pure tower (each node <= 1 child), else None."""
        depth, node = 1, self
        while node.children:
            if len(node.children) != 1:
                return None
            node = node.children[0]
            depth += 1
        return depth

    def weight(self) -> int:
        """Number of brace pairs strictly inside this one."""
        count, stack = 0, list(self.children)
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children)
        return count


def bag_to_tree(a: PrimeBag) -> BracketTree:
    require_natural("bracket form", a)
    members = []
    for k, m in a.entries:
        members.extend([BracketTree.tower(k)] * m.numerator)
    return BracketTree(tuple(members))


def tree_to_bag(tree: BracketTree) -> PrimeBag:
    """Interpret a bracket tree; every member must be a tower."""
    counts: Counter[int] = Counter()
    for position, member in enumerate(tree.children):
        depth = member.tower_depth()
        if depth is None:
            raise LiteralParseError(
                f"member {position + 1} is not a tower of braces; Rules 0-2 only "
                f"build towers (write non-prime factors in index form, e.g. {{2,1}})"
            )
        counts[depth] += 1
    return PrimeBag.from_entries(counts)


# ---------------------------------------------------------------------------
# Literal grammar
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<word>inf|i)|(?P<sym>[{}:,/\-]))")


class _Token(NamedTuple):
    kind: str  # "num", "word", "sym" or "end"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            start = len(text) - len(text[pos:].lstrip())
            raise LiteralParseError(
                f"unexpected character {text[start]!r}", text=text, position=start
            )
        kind = match.lastgroup or "sym"
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _LiteralParser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def token(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> LiteralParseError:
        tok = tok or self.token
        return LiteralParseError(message, text=self.text, position=tok.pos)

    def expect(self, value: str) -> _Token:
        if self.token.value != value:
            raise self.error(f"expected {value!r}")
        return self.advance()

    def parse(self) -> PrimeBag:
        sign, unit = 1, Unit.REAL
        if self.token.value == "-":
            self.advance()
            sign = -1
        if self.token.value == "i":
            self.advance()
            unit = Unit.IMAGINARY
        tok = self.token
        if tok.value == "inf":
            self.advance()
            bag = INFINITY
        elif tok.kind == "num":
            if int(tok.value) != 0:
                raise self.error("bare numbers are not PB literals (only 0 is)")
            self.advance()
            bag = ZERO
        elif tok.value == "{":
            bag = self.parse_finite()
            if bag.is_finite:
                bag = PrimeBag(bag.entries, sign, unit)
        else:
            raise self.error("expected '{', '0' or 'inf'")
        if self.token.kind != "end":
            raise self.error("unexpected text after the literal")
        return bag

    def parse_finite(self) -> PrimeBag:
        self.expect("{")
        if self.token.value == "}":
            self.advance()
            return ONE
        if self.token.value == "{":
            return tree_to_bag(self.parse_bracket_body())
        return self.parse_index_body()

    def parse_index_body(self) -> PrimeBag:
        pairs: list[tuple[int, Fraction]] = []
        while True:
            pairs.append(self.parse_entry())
            if self.token.value == ",":
                self.advance()
                continue
            self.expect("}")
            return PrimeBag.from_entries(pairs)

    def parse_entry(self) -> tuple[int, Fraction]:
        negative = False
        if self.token.value == "-":
            self.advance()
            negative = True
        tok = self.token
        if tok.kind != "num":
            raise self.error("expected a prime index")
        self.advance()
        index = int(tok.value)
        if index == 0:
            raise self.error("prime indices start at 1; 0 is not an index", tok)
        multiplicity = Fraction(1)
        if self.token.value == ":":
            self.advance()
            multiplicity = self.parse_rational()
        return index, -multiplicity if negative else multiplicity

    def parse_rational(self) -> Fraction:
        start = self.token
        negative = False
        if self.token.value == "-":
            self.advance()
            negative = True
        tok = self.token
        if tok.kind != "num":
            raise self.error("expected a multiplicity")
        self.advance()
        value = Fraction(int(tok.value))
        if self.token.value == "/":
            self.advance()
            den = self.token
            if den.kind != "num":
                raise self.error("expected a denominator")
            self.advance()
            if int(den.value) == 0:
                raise self.error("zero denominator", den)
            value /= int(den.value)
        if value == 0:
            raise self.error("an explicit zero multiplicity is not allowed", start)
        return -value if negative else value

    def parse_bracket_body(self) -> BracketTree:
        # The root '{' is consumed; build the tree without recursion so deep
        # towers do not hit the interpreter's recursion limit.
        stack: list[list[BracketTree]] = [[]]
        state = "open"  # open | closed | comma
        while True:
            tok = self.advance()
            if tok.value == "{" and state in ("open", "comma"):
                stack.append([])
                state = "open"
            elif tok.value == "}" and state in ("open", "closed"):
                node = BracketTree(tuple(stack.pop()))
                if not stack:
                    return node
                stack[-1].append(node)
                state = "closed"
            elif tok.value == "," and state == "closed":
                state = "comma"
            elif tok.kind == "end":
                raise self.error("unbalanced braces", tok)
            elif tok.kind == "num":
                raise self.error("bracket form cannot mix in index entries", tok)
            else:
                raise self.error(f"unexpected {tok.value!r} in bracket form", tok)


def validate(source: Union[str, BracketTree]) -> PrimeBag:
    """Parse and check a PB literal (either grammar) or a bracket tree."""
    if isinstance(source, BracketTree):
        return tree_to_bag(source)
    return _LiteralParser(source).parse()


def _member_key(entry: tuple[int, Fraction]) -> int:
    k, m = entry
    return k if m > 0 else -k


def format_pb(a: PrimeBag) -> str:
    """Canonical index-form text: members as signed indices, decreasing."""
    if a.is_zero:
        return "0"
    if a.is_infinity:
        return "inf"
    parts: list[str] = []
    for k, m in sorted(a.entries, key=_member_key, reverse=True):
        if m.denominator == 1 and 1 <= abs(m) <= REPEAT_LIMIT:
            member = str(k) if m > 0 else f"-{k}"
            parts.extend([member] * abs(m.numerator))
        else:
            parts.append(f"{k}:{m}")
    prefix = ("-" if a.sign < 0 else "") + ("i" if a.is_imaginary else "")
    return prefix + "{" + ",".join(parts) + "}"


def format_brackets(a: PrimeBag) -> str:
    """Nested-bracket text of a natural PB, members in decreasing order."""
    require_natural("bracket form", a)
    towers = []
    for k, m in a.entries:
        towers.extend(["{" * k + "}" * k] * m.numerator)
    return "{" + ",".join(towers) + "}"
