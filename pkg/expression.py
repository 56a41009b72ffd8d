"""Infix expressions over PB literals.

Grammar (precedence high to low, ``^`` right-associative, the rest left):

    ^          exponent; the right operand must be a number, e.g. {1,1}^(1/2)
    unary -    bag-level negation
    * /        bag union / difference
    + -        via conversion to positional and back

Operands are PB literals (``{2,1}``, ``i{1}``, ``inf``), decimal integers
and parenthesized sub-expressions. Integers stay exact scalars until they
meet a PB, so ``(1/2)`` is the number one half, not a bag quotient.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from convert import ConversionReceipt, add, pb_to_rational, rational_to_pb, sub
from errors import DomainError, LiteralParseError, ModeError, ResourceLimitError, UndefinedFormError
from pbnum import (
    DivMode,
    NumberClass,
    PrimeBag,
    classify,
    div,
    format_pb,
    mul,
    negate,
    power,
    truncated_quotient,
    validate,
)

logger = logging.getLogger(__name__)

Value = Union[PrimeBag, Fraction]

# Binding power of unary minus: tighter than * and /, looser than ^.
_NEGATION_BP = 25

_ALLOWED: dict[NumberClass, frozenset[NumberClass]] = {
    NumberClass.NATURAL: frozenset({NumberClass.NATURAL}),
    NumberClass.RATIONAL: frozenset({NumberClass.NATURAL, NumberClass.RATIONAL}),
    NumberClass.EXTENDED: frozenset(NumberClass),
}


def require_mode(bag: PrimeBag, mode: NumberClass) -> PrimeBag:
    """Reject PBs outside the number system selected by ``mode``."""
    if classify(bag) not in _ALLOWED[mode]:
        raise ModeError(f"{format_pb(bag)} is {classify(bag).value}, outside {mode.value} mode")
    return bag


class Token(NamedTuple):
    type: str  # "pb", "num", an operator character, or "end"
    value: str
    where: int


@dataclass
class EvalContext:
    mode: NumberClass = NumberClass.EXTENDED
    receipt: ConversionReceipt = field(default_factory=ConversionReceipt)
    truncations: list[dict[str, str]] = field(default_factory=list)

    def check(self, value: Value) -> Value:
        if isinstance(value, PrimeBag):
            require_mode(value, self.mode)
        return value

    def as_bag(self, value: Value) -> PrimeBag:
        if isinstance(value, PrimeBag):
            return value
        return rational_to_pb(value, self.receipt)


@dataclass
class Evaluation:
    source: str
    mode: NumberClass
    value: PrimeBag
    exact: Optional[Fraction]
    receipt: Optional[ConversionReceipt]
    truncations: list[dict[str, str]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

_SIMPLE_RE = re.compile(r"(?P<num>\d+)|(?P<inf>inf)|(?P<op>[-+*/^()])")


def _scan_braces(source: str, start: int) -> int:
    """Index just past the brace group opening at ``start``."""
    depth = 0
    for i in range(start, len(source)):
        if source[i] == "{":
            depth += 1
        elif source[i] == "}":
            depth -= 1
            if depth == 0:
                return i + 1
    raise LiteralParseError("unbalanced braces", text=source, position=start)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "{" or source.startswith("i{", pos):
            end = _scan_braces(source, pos + (ch == "i"))
            tokens.append(Token("pb", source[pos:end], pos))
            pos = end
            continue
        match = _SIMPLE_RE.match(source, pos)
        if match is None:
            raise LiteralParseError(f"unexpected character {ch!r}", text=source, position=pos)
        kind = match.lastgroup
        if kind == "inf":
            kind = "pb"
        elif kind == "op":
            kind = match.group()
        tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    return tokens


# ---------------------------------------------------------------------------
# Pratt parser
# ---------------------------------------------------------------------------


class Symbol:
    id = ""
    lbp = 0

    def __init__(self, parser: "Parser", token: Token) -> None:
        self.parser = parser
        self.token = token
        self.first: Optional[Symbol] = None
        self.second: Optional[Symbol] = None

    def nud(self) -> "Symbol":
        raise self.parser.error(f"unexpected {self.token.value or 'end of input'!r}", self.token)

    def led(self, left: "Symbol") -> "Symbol":
        raise self.parser.error(f"unexpected {self.token.value!r}", self.token)

    def eval(self, ctx: EvalContext) -> Value:
        raise NotImplementedError


class Infix(Symbol):
    right_assoc = False

    def led(self, left: Symbol) -> Symbol:
        self.first = left
        self.second = self.parser.expression(self.lbp - int(self.right_assoc))
        return self


class PbLiteral(Symbol):
    def nud(self) -> Symbol:
        return self

    def eval(self, ctx: EvalContext) -> Value:
        try:
            bag = validate(self.token.value)
        except LiteralParseError as exc:
            offset = self.token.where + (exc.position or 0)
            raise LiteralParseError(exc.reason, text=self.parser.source, position=offset) from exc
        return ctx.check(bag)


class Number(Symbol):
    def nud(self) -> Symbol:
        return self

    def eval(self, ctx: EvalContext) -> Value:
        return Fraction(int(self.token.value))


class Group(Symbol):
    def nud(self) -> Symbol:
        inner = self.parser.expression(0)
        self.parser.advance(")")
        return inner


class Plus(Infix):
    def eval(self, ctx: EvalContext) -> Value:
        a, b = self.first.eval(ctx), self.second.eval(ctx)
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return ctx.check(a + b)
        return ctx.check(add(ctx.as_bag(a), ctx.as_bag(b), ctx.receipt))


class Minus(Infix):
    def nud(self) -> Symbol:
        self.first = self.parser.expression(_NEGATION_BP)
        return Negation(self.parser, self.token, self.first)

    def eval(self, ctx: EvalContext) -> Value:
        a, b = self.first.eval(ctx), self.second.eval(ctx)
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return ctx.check(a - b)
        return ctx.check(sub(ctx.as_bag(a), ctx.as_bag(b), ctx.receipt))


class Negation(Symbol):
    def __init__(self, parser: "Parser", token: Token, operand: Symbol) -> None:
        super().__init__(parser, token)
        self.first = operand

    def eval(self, ctx: EvalContext) -> Value:
        value = self.first.eval(ctx)
        return ctx.check(-value if isinstance(value, Fraction) else negate(value))


class Times(Infix):
    def eval(self, ctx: EvalContext) -> Value:
        a, b = self.first.eval(ctx), self.second.eval(ctx)
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return ctx.check(a * b)
        return ctx.check(mul(ctx.as_bag(a), ctx.as_bag(b)))


class Divide(Infix):
    def eval(self, ctx: EvalContext) -> Value:
        a, b = self.first.eval(ctx), self.second.eval(ctx)
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            if b == 0:
                raise UndefinedFormError("division by zero")
            return a / b
        a, b = ctx.as_bag(a), ctx.as_bag(b)
        if ctx.mode is not NumberClass.NATURAL:
            return ctx.check(div(a, b, DivMode.EXACT))
        result = truncated_quotient(a, b)
        if not result.exact:
            note = {
                "kind": "NonDivisibility",
                "dividend": format_pb(a),
                "divisor": format_pb(b),
                "quotient": format_pb(result.quotient),
                "shortfall": format_pb(result.shortfall),
            }
            logger.info("%s does not divide %s; truncated %s", note["divisor"], note["dividend"], note["shortfall"])
            ctx.truncations.append(note)
        return ctx.check(result.quotient)


class Power(Infix):
    right_assoc = True

    def eval(self, ctx: EvalContext) -> Value:
        base, exponent = self.first.eval(ctx), self.second.eval(ctx)
        if not isinstance(exponent, Fraction):
            raise DomainError(
                f"the exponent must be a number, e.g. (1/2); got {format_pb(exponent)}"
            )
        if isinstance(base, Fraction) and exponent.denominator == 1:
            if base == 0 and exponent < 0:
                raise UndefinedFormError("division by zero")
            return ctx.check(base**exponent.numerator)
        natural_output = ctx.mode is not NumberClass.EXTENDED
        return ctx.check(power(ctx.as_bag(base), exponent, natural_output=natural_output))


class End(Symbol):
    pass


class Parser:
    def __init__(self) -> None:
        self.source = ""
        self.symbol_table: dict[str, type[Symbol]] = {}
        self.tokens: list[Token] = []
        self.index = 0
        self.token: Symbol

    def define(self, sid: str, lbp: int, symbol_class: type[Symbol]) -> None:
        self.symbol_table[sid] = type(symbol_class.__name__, (symbol_class,), {"id": sid, "lbp": lbp})

    def error(self, message: str, token: Token) -> LiteralParseError:
        return LiteralParseError(message, text=self.source, position=token.where)

    def advance(self, expected: Optional[str] = None) -> Symbol:
        current = self.token
        if expected is not None and current.id != expected:
            raise self.error(f"expected {expected!r}", current.token)
        if self.index < len(self.tokens):
            token = self.tokens[self.index]
            self.index += 1
        else:
            token = Token("end", "", len(self.source))
        self.token = self.symbol_table[token.type](self, token)
        return current

    def expression(self, rbp: int) -> Symbol:
        tok = self.advance()
        left = tok.nud()
        while rbp < self.token.lbp:
            tok = self.advance()
            left = tok.led(left)
        return left

    def parse(self, source: str) -> Symbol:
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0
        if not self.tokens:
            raise LiteralParseError("empty expression", text=source, position=0)
        self.token = End(self, Token("end", "", 0))
        self.advance()
        try:
            tree = self.expression(0)
        except RecursionError:
            raise self.error("expression nests too deeply", self.token.token) from None
        if self.token.id != "end":
            raise self.error(f"unexpected {self.token.token.value!r}", self.token.token)
        return tree


def _make_parser() -> Parser:
    parser = Parser()
    parser.define("end", 0, End)
    parser.define("pb", 0, PbLiteral)
    parser.define("num", 0, Number)
    parser.define("(", 0, Group)
    parser.define(")", 0, End)
    parser.define("+", 10, Plus)
    parser.define("-", 10, Minus)
    parser.define("*", 20, Times)
    parser.define("/", 20, Divide)
    parser.define("^", 30, Power)
    return parser


def evaluate(source: str, mode: NumberClass = NumberClass.EXTENDED) -> Evaluation:
    """Parse and evaluate ``source``; scalar results are converted to PBs."""
    ctx = EvalContext(mode=NumberClass(mode))
    tree = _make_parser().parse(source)
    try:
        value = tree.eval(ctx)
    except RecursionError:
        raise ResourceLimitError("expression is too deep to evaluate") from None
    bag = ctx.check(ctx.as_bag(value))
    exact: Optional[Fraction]
    try:
        exact = pb_to_rational(bag)
    except DomainError:
        exact = None
    receipt = ctx.receipt if ctx.receipt.conversions else None
    if receipt is not None:
        logger.debug("evaluating %r cost %d work units", source, receipt.total)
    return Evaluation(source, ctx.mode, bag, exact, receipt, ctx.truncations)
