"""Counter-based benchmarks of PB versus positional (and bag) arithmetic.

Each operation reports a deterministic work counter (entry visits for
PBs, digit products for schoolbook arithmetic, receipts for conversions)
alongside advisory wall time. The slope of log(counter) against log(size)
is the empirical scaling exponent; sizes are representation-native (PB
entries, decimal digits, bag members) and every row also records the
operand value's digit count so matched-magnitude views are possible.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import random
import statistics
import time
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from altreps import DecBag, MulBag, decbag_add, decbag_mul, mulbag_mul, mulbag_to_pb, mulbag_value
from convert import ConversionReceipt, add as pb_add, natural_to_pb
from errors import DomainError, ResourceLimitError
from pbnum import PrimeBag, factor_pb, gcd as pb_gcd, is_prime_pb, mul as pb_mul
from primes import WorkTally, factor_natural, is_prime_natural, nth_prime

logger = logging.getLogger(__name__)

# Larger indices are not sieved just to label a row with its magnitude.
_DIGITS_INDEX_LIMIT = 10**6

CSV_COLUMNS = ("op", "repr", "size", "counter", "wall_ns", "slope", "r2")


class Operation(str, Enum):
    MUL = "mul"
    GCD = "gcd"
    FACTOR = "factor"
    PRIMALITY = "primality"
    ADD = "add"
    CALIBRATE = "calibrate"


class Representation(str, Enum):
    PB = "pb"
    POSITIONAL = "positional"
    DECBAG = "decbag"
    MULBAG = "mulbag"


class Distribution(str, Enum):
    RANDOM_PB = "random-pb-of-n-entries"
    RANDOM_NATURAL = "random-n-digit-natural"
    WORST_CASE_PRIME = "worst-case-prime"
    SEMIPRIME = "random-n-digit-semiprime"
    RANDOM_BAG = "random-bag-of-n-members"


class ReportFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"


SUPPORTED: dict[Operation, tuple[Representation, ...]] = {
    Operation.MUL: (Representation.PB, Representation.POSITIONAL, Representation.DECBAG, Representation.MULBAG),
    Operation.GCD: (Representation.PB, Representation.POSITIONAL),
    Operation.FACTOR: (Representation.PB, Representation.POSITIONAL, Representation.MULBAG),
    Operation.PRIMALITY: (Representation.PB, Representation.POSITIONAL),
    Operation.ADD: (Representation.PB, Representation.POSITIONAL, Representation.DECBAG),
    Operation.CALIBRATE: tuple(Representation),
}

# Input distribution used by compare_representations for each series.
DEFAULT_DISTRIBUTION: dict[tuple[Operation, Representation], Distribution] = {
    (Operation.FACTOR, Representation.PB): Distribution.SEMIPRIME,
    (Operation.FACTOR, Representation.POSITIONAL): Distribution.SEMIPRIME,
    (Operation.PRIMALITY, Representation.PB): Distribution.WORST_CASE_PRIME,
    (Operation.PRIMALITY, Representation.POSITIONAL): Distribution.WORST_CASE_PRIME,
    (Operation.ADD, Representation.PB): Distribution.RANDOM_NATURAL,
}


def default_distribution(op: Operation, representation: Representation) -> Distribution:
    if (op, representation) in DEFAULT_DISTRIBUTION:
        return DEFAULT_DISTRIBUTION[(op, representation)]
    return {
        Representation.PB: Distribution.RANDOM_PB,
        Representation.POSITIONAL: Distribution.RANDOM_NATURAL,
        Representation.DECBAG: Distribution.RANDOM_BAG,
        Representation.MULBAG: Distribution.RANDOM_BAG,
    }[representation]


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class BenchSpec(BaseModel):
    """One benchmark: an operation in one representation over a size ladder."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    op: Operation = Field(..., description="Operation to measure")
    representation: Representation = Field(default=Representation.PB, description="Operand representation")
    sizes: list[int] = Field(..., min_length=1, description="Strictly increasing operand sizes")
    repetitions: int = Field(default=5, ge=5, le=1000, description="Measurements per size")
    distribution: Optional[Distribution] = Field(
        default=None, description="Input distribution; defaults per operation and representation"
    )
    seed: int = Field(default=0, description="Seed of the input generator")
    calibration_exponent: float = Field(
        default=1.0, gt=0, le=4, description="Cost exponent of the calibrate busy loop"
    )

    @field_validator("sizes")
    @classmethod
    def _strictly_increasing(cls, sizes: list[int]) -> list[int]:
        if any(n < 1 for n in sizes):
            raise ValueError("sizes must be positive")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        return sizes

    @model_validator(mode="after")
    def _supported(self) -> "BenchSpec":
        if self.representation not in SUPPORTED[self.op]:
            raise ValueError(f"{self.op.value} is not defined on {self.representation.value}")
        if self.distribution is None:
            self.distribution = default_distribution(self.op, self.representation)
        return self


class BenchRow(BaseModel):
    op: str
    representation: str
    size: int
    counter: float = Field(description="Median work counter")
    dispersion: float = Field(description="Interquartile range of the counter")
    wall_ns: int = Field(description="Median wall time, advisory only")
    value_digits: int = Field(description="Median decimal digits of the first operand's value")


class BenchSeries(BaseModel):
    op: str
    representation: str
    distribution: str
    rows: list[BenchRow] = Field(default_factory=list)
    slope: Optional[float] = None
    r2: Optional[float] = None
    complete: bool = True


class BenchReport(BaseModel):
    seed: int
    series: list[BenchSeries] = Field(default_factory=list)

    @property
    def complete(self) -> bool:
        return all(s.complete for s in self.series)

    def get(self, representation: Representation) -> BenchSeries:
        for series in self.series:
            if series.representation == representation.value:
                return series
        raise KeyError(representation.value)


# ---------------------------------------------------------------------------
# Input generation
# ---------------------------------------------------------------------------


def _random_digits(rng: random.Random, digits: int) -> int:
    return rng.randrange(10 ** (digits - 1), 10**digits)


def _random_prime(rng: random.Random, digits: int) -> int:
    low, high = (2, 10) if digits == 1 else (10 ** (digits - 1), 10**digits)
    while True:
        candidate = rng.randrange(low, high) | 1
        if candidate < high and is_prime_natural(candidate):
            return candidate


def _random_pb(rng: random.Random, entries: int) -> PrimeBag:
    indices = rng.sample(range(1, 4 * entries + 1), entries)
    return PrimeBag.from_entries({k: rng.randint(1, 3) for k in indices})


def _natural(rng: random.Random, distribution: Distribution, size: int) -> int:
    if distribution is Distribution.WORST_CASE_PRIME:
        return _random_prime(rng, size)
    if distribution is Distribution.SEMIPRIME:
        half = max(1, size // 2)
        return _random_prime(rng, size - half if size > 1 else 1) * _random_prime(rng, half)
    return _random_digits(rng, size)


def _operand(spec: BenchSpec, rng: random.Random, size: int) -> Any:
    rep, dist = spec.representation, spec.distribution
    if rep is Representation.DECBAG:
        return DecBag.from_members(rng.randrange(size) for _ in range(size))
    if rep is Representation.MULBAG:
        return MulBag.from_members(rng.randint(2, 1000) for _ in range(size))
    if rep is Representation.PB:
        if dist is Distribution.RANDOM_PB or dist is Distribution.RANDOM_BAG:
            return _random_pb(rng, size)
        if dist is Distribution.WORST_CASE_PRIME and spec.op is Operation.PRIMALITY:
            # Prime PBs of growing value: the singleton of a large index.
            return PrimeBag.prime(2**size)
        return natural_to_pb(_natural(rng, dist, size))[0]
    if dist is Distribution.RANDOM_PB:
        return _pb_value(_random_pb(rng, size))
    return _natural(rng, dist, size)


def _pb_value(a: PrimeBag) -> int:
    return math.prod(nth_prime(k) ** m.numerator for k, m in a.entries)


def _value_digits(operand: Any) -> int:
    if isinstance(operand, int):
        return len(str(operand))
    if isinstance(operand, PrimeBag):
        if any(k > _DIGITS_INDEX_LIMIT for k, _ in operand.entries):
            return 0
        log10 = sum(float(m) * math.log10(nth_prime(k)) for k, m in operand.entries)
        return int(log10) + 1
    if isinstance(operand, DecBag):
        return max(operand.members, default=0) + 1
    if isinstance(operand, MulBag):
        return len(str(mulbag_value(operand)))
    return 0


# ---------------------------------------------------------------------------
# Counted operations
# ---------------------------------------------------------------------------


def _digits(n: int) -> int:
    return len(str(abs(n))) if n else 1


def _positional_gcd(a: int, b: int) -> int:
    """Euclid, charging digits(b) * (digits(a) - digits(b) + 1) per remainder."""
    work = 0
    while b:
        work += _digits(b) * (_digits(a) - _digits(b) + 1)
        a, b = b, a % b
    return work


def _decimal_digits(n: int) -> list[int]:
    """Least significant digit first."""
    return [int(c) for c in reversed(str(n))]


def _from_decimal_digits(digits: list[int]) -> int:
    return int("".join(map(str, reversed(digits))) or "0")


def schoolbook_mul(a: int, b: int) -> tuple[int, int]:
    """Digit-by-digit long multiplication of naturals: (product, digit products)."""
    xs, ys = _decimal_digits(a), _decimal_digits(b)
    acc = [0] * (len(xs) + len(ys))
    work = 0
    for i, x in enumerate(xs):
        carry = 0
        for j, y in enumerate(ys):
            work += 1
            t = acc[i + j] + x * y + carry
            acc[i + j], carry = t % 10, t // 10
        acc[i + len(ys)] = carry
    return _from_decimal_digits(acc), work


def schoolbook_add(a: int, b: int) -> tuple[int, int]:
    """Digit-by-digit addition of naturals: (sum, digit additions)."""
    xs, ys = _decimal_digits(a), _decimal_digits(b)
    width = max(len(xs), len(ys))
    xs += [0] * (width - len(xs))
    ys += [0] * (width - len(ys))
    out: list[int] = []
    carry = 0
    for x, y in zip(xs, ys):
        t = x + y + carry
        out.append(t % 10)
        carry = t // 10
    out.append(carry)
    return _from_decimal_digits(out), width


def _primality_cost(n: int) -> int:
    """Modular squarings spent by is_prime_natural (1 for a cache lookup)."""
    tally = WorkTally()
    is_prime_natural(n, tally=tally)
    return max(tally.modular_squarings, 1)


def _calibrate(size: int, exponent: float) -> int:
    iterations = round(size**exponent)
    for _ in range(iterations):
        pass
    return iterations


def _measure(spec: BenchSpec, a: Any, b: Any, size: int) -> int:
    op, rep = spec.op, spec.representation
    if op is Operation.CALIBRATE:
        return _calibrate(size, spec.calibration_exponent)
    if rep is Representation.PB:
        if op is Operation.MUL:
            pb_mul(a, b)
            return len(a.entries) + len(b.entries)
        if op is Operation.GCD:
            pb_gcd(a, b)
            return len(a.entries) + len(b.entries)
        if op is Operation.FACTOR:
            factor_pb(a)
            return len(a.entries)
        if op is Operation.PRIMALITY:
            is_prime_pb(a)
            return 1
        receipt = ConversionReceipt()
        pb_add(a, b, receipt)
        return receipt.total
    if rep is Representation.POSITIONAL:
        if op is Operation.MUL:
            return schoolbook_mul(a, b)[1]
        if op is Operation.GCD:
            return _positional_gcd(a, b)
        if op is Operation.FACTOR:
            tally = WorkTally()
            factor_natural(a, tally=tally)
            return tally.total
        if op is Operation.PRIMALITY:
            return _primality_cost(a)
        return schoolbook_add(a, b)[1]
    if rep is Representation.DECBAG:
        if op is Operation.MUL:
            decbag_mul(a, b)
            return len(a) * len(b)
        decbag_add(a, b)
        return len(a) + len(b)
    if op is Operation.MUL:
        mulbag_mul(a, b)
        return len(a) + len(b)
    tally = WorkTally()
    for member in a.members:
        factor_natural(member, tally=tally)
    mulbag_to_pb(a)
    return tally.total + len(a)


# ---------------------------------------------------------------------------
# Fitting and running
# ---------------------------------------------------------------------------


def fit_slope(sizes: list[int], costs: list[float]) -> tuple[Optional[float], Optional[float]]:
    """Least-squares slope of log(cost) on log(size) and its r**2."""
    if len(sizes) < 2:
        return None, None
    xs = [math.log(n) for n in sizes]
    ys = [math.log(max(c, 1.0)) for c in costs]
    slope, _ = statistics.linear_regression(xs, ys)
    if len(set(ys)) == 1:
        return slope, 1.0
    return slope, statistics.correlation(xs, ys) ** 2


def _series(spec: BenchSpec) -> BenchSeries:
    rng = random.Random(spec.seed)
    series = BenchSeries(
        op=spec.op.value,
        representation=spec.representation.value,
        distribution=spec.distribution.value,
    )
    for size in spec.sizes:
        counters: list[int] = []
        walls: list[int] = []
        digits: list[int] = []
        try:
            for _ in range(spec.repetitions):
                a, b = _operand(spec, rng, size), _operand(spec, rng, size)
                start = time.perf_counter_ns()
                counters.append(_measure(spec, a, b, size))
                walls.append(time.perf_counter_ns() - start)
                digits.append(_value_digits(a))
        except ResourceLimitError as exc:
            logger.warning(
                "%s/%s stopped at size %d: %s", spec.op.value, spec.representation.value, size, exc
            )
            series.complete = False
            break
        q1, _, q3 = statistics.quantiles(counters, n=4)
        series.rows.append(
            BenchRow(
                op=spec.op.value,
                representation=spec.representation.value,
                size=size,
                counter=statistics.median(counters),
                dispersion=q3 - q1,
                wall_ns=int(statistics.median(walls)),
                value_digits=int(statistics.median(digits)),
            )
        )
        logger.info("%s/%s size %d done", spec.op.value, spec.representation.value, size)
    series.slope, series.r2 = fit_slope(
        [row.size for row in series.rows], [row.counter for row in series.rows]
    )
    return series


def run_bench(spec: BenchSpec) -> BenchReport:
    """Measure one spec; a ceiling hit ends the ladder and flags the report incomplete."""
    return BenchReport(seed=spec.seed, series=[_series(spec)])


def compare_representations(
    op: Operation, sizes: list[int], seed: int = 0, repetitions: int = 5
) -> BenchReport:
    """One series per representation supporting ``op``."""
    op = Operation(op)
    representations = SUPPORTED[op]
    if op is Operation.CALIBRATE or len(representations) < 2:
        raise DomainError(f"{op.value} is not available in two representations")
    report = BenchReport(seed=seed)
    for representation in representations:
        spec = BenchSpec(
            op=op,
            representation=representation,
            sizes=sizes,
            repetitions=repetitions,
            seed=seed,
        )
        report.series.append(_series(spec))
    return report


def load_spec(path: Path) -> BenchSpec:
    return BenchSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def _number(x: Optional[float]) -> str:
    if x is None:
        return ""
    rounded = round(float(x), 6)
    if rounded.is_integer():
        return str(int(rounded))
    return repr(rounded)


def _records(report: BenchReport) -> list[dict[str, str]]:
    return [
        {
            "op": row.op,
            "repr": row.representation,
            "size": str(row.size),
            "counter": _number(row.counter),
            "wall_ns": str(row.wall_ns),
            "slope": _number(series.slope),
            "r2": _number(series.r2),
        }
        for series in report.series
        for row in series.rows
    ]


def export_report(report: BenchReport, fmt: ReportFormat = ReportFormat.CSV) -> bytes:
    """CSV or JSON lines; one record per (series, size) in a fixed column order."""
    records = _records(report)
    if ReportFormat(fmt) is ReportFormat.JSONL:
        return "".join(json.dumps(r) + "\n" for r in records).encode("utf-8")
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buffer.getvalue().encode("utf-8")


def write_report(report: BenchReport, path: Path, fmt: ReportFormat = ReportFormat.CSV) -> None:
    Path(path).write_bytes(export_report(report, fmt))
