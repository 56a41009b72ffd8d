#!/usr/bin/env python3
"""
Prime-bag calculator command line.

Usage:
    python prime_bag_cli.py eval "{1} * {2}"          # {2,1} / 6
    python prime_bag_cli.py convert 40                # {3,1,1,1}
    python prime_bag_cli.py cmp "{2,2}" "{3,1}"       # partial: incomparable, exact: less
    python prime_bag_cli.py partitions 4
    python prime_bag_cli.py --json pi2 25
    python prime_bag_cli.py bench --compare mul --sizes 16 32 64 128

Exit codes: 0 ok, 2 domain error, 3 resource ceiling, 4 parse or usage
error, 1 anything else (I/O). ``--json`` prints exactly one JSON document
{command, inputs, result, receipts, diagnostics} on stdout; logs go to
stderr (``--verbose`` for DEBUG).
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, NamedTuple, Optional

import mpmath
from pydantic import BaseModel, Field, ValidationError

import altreps
import bench
from convert import ConversionReceipt, euler_pi_squared, natural_to_pb, pb_to_rational, rational_to_pb, value_or_none
from errors import DomainError, LiteralParseError, PrimeBagError, describe, exit_code_for
from expression import evaluate, require_mode
from order import OrderResult, partial_compare, signed_compare
from partition import generate_ordered, partition_rows
from pbnum import NumberClass, PrimeBag, classify, factor_pb, format_pb, gcd, is_natural, is_prime_pb, lcm, validate
from primes import is_prime_natural, nth_prime
from settings import configure_logging

MAX_DIGITS = 10_000
DEFAULT_DIGITS = 10


class UsageError(LiteralParseError):
    """Bad command line: unknown subcommand, missing or malformed argument."""


class CommandOutcome(NamedTuple):
    exit_code: int
    stdout: str
    stderr: str


class Envelope(BaseModel):
    """The single JSON document printed in --json mode."""

    command: Optional[str] = Field(default=None, description="Subcommand that ran")
    inputs: dict[str, Any] = Field(default_factory=dict)
    result: Any = None
    receipts: Optional[dict[str, Any]] = None
    diagnostics: list[Any] = Field(default_factory=list)


class Result(NamedTuple):
    text: str
    data: Any
    receipts: Optional[dict[str, Any]] = None
    notes: tuple[dict[str, Any], ...] = ()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render_decimal(q: Fraction, digits: int = DEFAULT_DIGITS) -> str:
    """``a/b = d.ddd`` with ``..`` when the expansion was cut; integers print bare."""
    if not 0 <= digits <= MAX_DIGITS:
        raise DomainError(f"digits must be between 0 and {MAX_DIGITS}, got {digits}")
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    sign = "-" if q < 0 else ""
    whole, rest = divmod(abs(q.numerator), q.denominator)
    fraction_digits: list[str] = []
    while rest and len(fraction_digits) < digits:
        digit, rest = divmod(rest * 10, q.denominator)
        fraction_digits.append(str(digit))
    tail = ".." if rest else ""
    return f"{q} = {sign}{whole}.{''.join(fraction_digits)}{tail}"


def _value_line(bag: PrimeBag, digits: int) -> Optional[str]:
    value = value_or_none(bag)
    return None if value is None else render_decimal(value, digits)


def _looks_like_pb(text: str) -> bool:
    return "{" in text or text.lstrip("-").lstrip("i") == "inf"


def _operand(text: str, receipt: ConversionReceipt, mode: NumberClass) -> PrimeBag:
    """A PB literal, or a positional integer / a/b converted by factoring, within ``mode``."""
    text = text.strip()
    if _looks_like_pb(text):
        return require_mode(validate(text), mode)
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralParseError(
            f"not a PB literal or an exact number: {text!r}", text=text, position=0
        ) from exc
    if q.denominator == 1 and q >= 1:
        return require_mode(natural_to_pb(q.numerator, receipt)[0], mode)
    return require_mode(rational_to_pb(q, receipt), mode)


def _receipts(receipt: ConversionReceipt) -> Optional[dict[str, Any]]:
    return receipt.as_dict() if receipt.conversions else None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> Result:
    result = evaluate(args.expr, NumberClass(args.mode))
    lines = [format_pb(result.value)]
    decimal = None if result.exact is None else render_decimal(result.exact, args.digits)
    if decimal is not None:
        lines.append(decimal)
    data = {
        "pb": format_pb(result.value),
        "class": classify(result.value).value,
        "exact": None if result.exact is None else str(result.exact),
        "decimal": decimal,
    }
    return Result(
        "\n".join(lines),
        data,
        result.receipt.as_dict() if result.receipt else None,
        tuple(result.truncations),
    )


def cmd_convert(args: argparse.Namespace) -> Result:
    receipt = ConversionReceipt()
    text = args.value.strip()
    mode = NumberClass(args.mode)
    if _looks_like_pb(text):
        bag = require_mode(validate(text), mode)
        value = pb_to_rational(bag, receipt)
        receipt.result = str(value)
        rendered = render_decimal(value, args.digits)
        return Result(rendered, {"pb": format_pb(bag), "exact": str(value), "decimal": rendered}, _receipts(receipt))
    bag = _operand(text, receipt, mode)
    return Result(format_pb(bag), {"pb": format_pb(bag), "exact": text}, _receipts(receipt))


def cmd_factor(args: argparse.Namespace) -> Result:
    receipt = ConversionReceipt()
    bag = _operand(args.value, receipt, NumberClass(args.mode))
    factors = [
        {"index": k, "prime": nth_prime(k), "multiplicity": m} for k, m in factor_pb(bag)
    ]
    product = " * ".join(
        f"{f['prime']}^{f['multiplicity']}" if f["multiplicity"] > 1 else str(f["prime"])
        for f in reversed(factors)
    )
    text = f"{format_pb(bag)} = {product or '1'}"
    return Result(text, {"pb": format_pb(bag), "factors": factors}, _receipts(receipt))


def cmd_isprime(args: argparse.Namespace) -> Result:
    text = args.value.strip()
    if not _looks_like_pb(text) and text.isdigit():
        prime = is_prime_natural(int(text))
        return Result("true" if prime else "false", {"value": text, "prime": prime})
    bag = require_mode(validate(text), NumberClass(args.mode))
    prime = is_prime_pb(bag)
    return Result("true" if prime else "false", {"pb": format_pb(bag), "prime": prime})


def _binary(args: argparse.Namespace, op: Any) -> Result:
    receipt = ConversionReceipt()
    mode = NumberClass(args.mode)
    a, b = _operand(args.a, receipt, mode), _operand(args.b, receipt, mode)
    bag = op(a, b)
    lines = [format_pb(bag)]
    decimal = _value_line(bag, args.digits)
    if decimal is not None:
        lines.append(decimal)
    return Result("\n".join(lines), {"pb": format_pb(bag), "decimal": decimal}, _receipts(receipt))


def cmd_gcd(args: argparse.Namespace) -> Result:
    return _binary(args, gcd)


def cmd_lcm(args: argparse.Namespace) -> Result:
    return _binary(args, lcm)


def cmd_cmp(args: argparse.Namespace) -> Result:
    receipt = ConversionReceipt()
    mode = NumberClass(args.mode)
    a, b = _operand(args.a, receipt, mode), _operand(args.b, receipt, mode)
    partial: Optional[OrderResult] = (
        partial_compare(a, b) if is_natural(a) and is_natural(b) else None
    )
    exact = signed_compare(a, b)
    partial_text = partial.value if partial is not None else "n/a"
    text = f"partial: {partial_text}\nexact: {exact.value}"
    data = {"a": format_pb(a), "b": format_pb(b), "partial": partial_text, "exact": exact.value}
    return Result(text, data, _receipts(receipt))


def cmd_partitions(args: argparse.Namespace) -> Result:
    if args.ordered:
        records = [
            {
                "weight": g.weight,
                "pb": format_pb(g.bag),
                "rule": g.rule,
                "parent": None if g.parent is None else format_pb(g.parent),
            }
            for g in generate_ordered(args.n)
        ]
        lines = ["weight\tpb\trule\tparent"] + [
            f"{r['weight']}\t{r['pb']}\t{r['rule']}\t{r['parent'] or '-'}" for r in records
        ]
        return Result("\n".join(lines), records)
    rows = partition_rows(args.n)
    records = [
        {
            "weight": row.weight,
            "partition": "+".join(map(str, row.partition)) or "0",
            "pb": format_pb(row.bag),
            "value": row.value,
            "prime": row.prime,
        }
        for row in rows
    ]
    lines = ["weight\tpartition\tpb\tvalue\tprime"] + [
        f"{r['weight']}\t{r['partition']}\t{r['pb']}\t{r['value']}\t{'yes' if r['prime'] else 'no'}"
        for r in records
    ]
    return Result("\n".join(lines), records)


def cmd_pi2(args: argparse.Namespace) -> Result:
    value = euler_pi_squared(args.count)
    with mpmath.workdps(max(30, args.digits + 10)):
        gap = mpmath.pi**2 - mpmath.mpf(value.numerator) / value.denominator
        gap_text = mpmath.nstr(gap, 6)
    rendered = render_decimal(value, args.digits)
    return Result(
        f"{rendered}\npi^2 - product = {gap_text}",
        {"count": args.count, "exact": str(value), "decimal": rendered, "gap": gap_text},
    )


def _decbag_arg(text: str) -> altreps.DecBag:
    text = text.strip()
    if text.isdigit():
        return altreps.DecBag.from_int(int(text))
    return altreps.DecBag.parse(text)


def cmd_decbag(args: argparse.Namespace) -> Result:
    bags = [_decbag_arg(t) for t in args.operands]
    arity = {"add": 2, "sub": 2, "mul": 2, "normalize": 1, "value": 1}[args.op]
    if len(bags) != arity:
        raise UsageError(f"decbag {args.op} takes {arity} operand(s), got {len(bags)}")
    if args.op == "value":
        value = altreps.decbag_value(bags[0])
        return Result(str(value), {"bag": str(bags[0]), "value": value})
    if args.op == "normalize":
        bag = altreps.decbag_normalize(bags[0])
    else:
        bag = {"add": altreps.decbag_add, "sub": altreps.decbag_sub, "mul": altreps.decbag_mul}[args.op](*bags)
    value = altreps.decbag_value(bag)
    return Result(f"{bag}\n{value}", {"bag": str(bag), "value": value})


def _mulbag_arg(text: str) -> altreps.MulBag:
    text = text.strip()
    if text.isdigit():
        return altreps.MulBag.from_int(int(text))
    return altreps.MulBag.parse(text)


def cmd_mulbag(args: argparse.Namespace) -> Result:
    arity = {"mul": 2, "value": 1, "to-pb": 1, "normalize": 1, "from-pb": 1}[args.op]
    if len(args.operands) != arity:
        raise UsageError(f"mulbag {args.op} takes {arity} operand(s), got {len(args.operands)}")
    if args.op == "from-pb":
        bag = altreps.mulbag_from_pb(validate(args.operands[0]))
        return Result(str(bag), {"bag": str(bag), "value": altreps.mulbag_value(bag)})
    bags = [_mulbag_arg(t) for t in args.operands]
    if args.op == "value":
        value = altreps.mulbag_value(bags[0])
        return Result(str(value), {"bag": str(bags[0]), "value": value})
    if args.op == "to-pb":
        pb = altreps.mulbag_to_pb(bags[0])
        return Result(format_pb(pb), {"bag": str(bags[0]), "pb": format_pb(pb)})
    bag = altreps.mulbag_mul(*bags) if args.op == "mul" else altreps.mulbag_normalize(bags[0])
    value = altreps.mulbag_value(bag)
    return Result(f"{bag}\n{value}", {"bag": str(bag), "value": value})


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    field = ".".join(str(part) for part in error["loc"])
    return f"{field}: {error['msg']}" if field else error["msg"]


def cmd_bench(args: argparse.Namespace) -> Result:
    if args.compare:
        if not args.sizes:
            raise UsageError("bench --compare needs --sizes")
        try:
            report = bench.compare_representations(
                bench.Operation(args.compare), args.sizes, seed=args.seed, repetitions=args.repetitions
            )
        except ValidationError as exc:
            raise UsageError(f"invalid bench arguments: {_first_error(exc)}") from exc
    elif args.spec:
        try:
            spec = bench.load_spec(Path(args.spec))
        except ValidationError as exc:
            raise UsageError(f"invalid bench spec {args.spec}: {_first_error(exc)}") from exc
        except ValueError as exc:
            raise LiteralParseError(f"invalid bench spec {args.spec}: {exc}") from exc
        report = bench.run_bench(spec)
    else:
        raise UsageError("bench needs a spec file or --compare OP")
    fmt = bench.ReportFormat(args.format)
    if args.out:
        bench.write_report(report, Path(args.out), fmt)
        text = f"wrote {sum(len(s.rows) for s in report.series)} rows to {args.out}"
    else:
        text = bench.export_report(report, fmt).decode("utf-8").rstrip("\n")
    if not report.complete:
        text += "\n(incomplete: a resource ceiling stopped at least one series)"
    return Result(text, report.model_dump(mode="json"))


COMMANDS = {
    "eval": cmd_eval,
    "convert": cmd_convert,
    "factor": cmd_factor,
    "isprime": cmd_isprime,
    "gcd": cmd_gcd,
    "lcm": cmd_lcm,
    "cmp": cmd_cmp,
    "partitions": cmd_partitions,
    "pi2": cmd_pi2,
    "decbag": cmd_decbag,
    "mulbag": cmd_mulbag,
    "bench": cmd_bench,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{message}\n{self.format_usage().strip()}")


def _digits(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"must be between 0 and {MAX_DIGITS}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="prime_bag_cli", description="Prime-bag arithmetic")
    parser.add_argument("--json", action="store_true", help="print one JSON document")
    parser.add_argument(
        "--mode",
        choices=[c.value for c in NumberClass],
        default=NumberClass.EXTENDED.value,
        help="number system operations are restricted to",
    )
    parser.add_argument("--digits", type=_digits, default=DEFAULT_DIGITS, help="decimal digits shown")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging and receipts")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("eval", help="evaluate a PB expression")
    p.add_argument("expr")
    for name, help_text in (
        ("convert", "positional <-> PB conversion"),
        ("factor", "factor a PB or natural"),
        ("isprime", "primality of a PB or natural"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("value")
    for name in ("gcd", "lcm", "cmp"):
        p = sub.add_parser(name, help=f"{name} of two PBs")
        p.add_argument("a")
        p.add_argument("b")
    p = sub.add_parser("partitions", help="weight-n PBs as partitions of n")
    p.add_argument("n", type=int)
    p.add_argument("--ordered", action="store_true", help="all weights <= n with provenance")
    p = sub.add_parser("pi2", help="truncated Euler product for pi^2")
    p.add_argument("count", type=int)
    p = sub.add_parser("decbag", help="powers-of-ten bags")
    p.add_argument("op", choices=["add", "sub", "mul", "normalize", "value"])
    p.add_argument("operands", nargs="+")
    p = sub.add_parser("mulbag", help="integer product bags")
    p.add_argument("op", choices=["mul", "value", "to-pb", "normalize", "from-pb"])
    p.add_argument("operands", nargs="+")
    p = sub.add_parser("bench", help="run a benchmark spec or a representation comparison")
    p.add_argument("spec", nargs="?", help="JSON file mirroring BenchSpec")
    p.add_argument("--compare", choices=[o.value for o in bench.Operation if o is not bench.Operation.CALIBRATE])
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--format", choices=[f.value for f in bench.ReportFormat], default="csv")
    p.add_argument("--out", help="write the report here instead of stdout")
    return parser


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"json", "verbose", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def dispatch(argv: list[str]) -> CommandOutcome:
    """Run one command line and capture its output and exit code."""
    json_mode = "--json" in argv
    args: Optional[argparse.Namespace] = None
    help_out = io.StringIO()
    try:
        with contextlib.redirect_stdout(help_out):
            args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return CommandOutcome(int(exc.code or 0), help_out.getvalue(), "")
    except (PrimeBagError, OSError) as exc:
        code = exit_code_for(exc)
        if json_mode:
            envelope = Envelope(
                command=None if args is None else args.command,
                inputs={} if args is None else _inputs(args),
                diagnostics=[describe(exc)],
            )
            return CommandOutcome(code, envelope.model_dump_json(indent=2) + "\n", "")
        return CommandOutcome(code, "", f"error: {exc}\n")

    stderr = "".join(
        f"note: {n['divisor']} does not divide {n['dividend']}; truncated {n['shortfall']}\n"
        for n in result.notes
    )
    if args.verbose and result.receipts:
        stderr += "receipt: " + ", ".join(f"{k}={v}" for k, v in result.receipts.items()) + "\n"
    if json_mode:
        envelope = Envelope(
            command=args.command,
            inputs=_inputs(args),
            result=result.data,
            receipts=result.receipts,
            diagnostics=list(result.notes),
        )
        return CommandOutcome(0, envelope.model_dump_json(indent=2) + "\n", stderr)
    return CommandOutcome(0, result.text + "\n", stderr)


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    configure_logging(verbose="-v" in argv or "--verbose" in argv)
    outcome = dispatch(argv)
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
