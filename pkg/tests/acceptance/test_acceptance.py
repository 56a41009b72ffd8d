"""Acceptance sweeps: exhaustive, million-element and benchmark checks.

These take seconds to minutes and are deselected by the default run
(pytest.ini adds ``-m "not slow"``); the unit suite runs reduced versions
of each property.

Usage:
    pytest tests/acceptance/ -m slow
"""

import random
from fractions import Fraction
from itertools import product
from math import gcd as int_gcd, lcm as int_lcm

import mpmath
import pytest

from altreps import DecBag, decbag_mul, decbag_value
from bench import BenchSpec, Operation, Representation, compare_representations, run_bench
from convert import add, euler_pi_squared, natural_to_pb, pb_to_rational, rational_to_pb, sub
from errors import IrrationalityError
from order import OrderResult, exact_compare, increment_member, partial_compare
from partition import enumerate_weight, hr_estimate, partition_count
from pbnum import TWO, div, gcd, is_prime_pb, lcm, mul, power, validate

pytestmark = pytest.mark.slow


def pb(text: str):
    return validate(text)


def slope(**spec) -> float:
    return run_bench(BenchSpec(**spec)).series[0].slope


# ===================================================================
# Worked examples
# ===================================================================


@pytest.mark.timeout(1)
class TestWorkedExamples:
    """Reference values for arithmetic, powers and bag representations."""

    def test_arithmetic(self) -> None:
        assert natural_to_pb(12)[0] == pb("{2,1,1}")
        assert natural_to_pb(40)[0] == pb("{3,1,1,1}")
        assert gcd(natural_to_pb(40)[0], natural_to_pb(60)[0]) == pb("{3,1,1}")
        assert pb_to_rational(pb("{3,1,1}")) == 20
        assert rational_to_pb(Fraction(6, 5)) == pb("{2,1,-3}")
        assert div(pb("{2,1}"), pb("{3}")) == pb("{2,1,-3}")
        assert rational_to_pb(Fraction(2, 9)) == pb("{1,-2,-2}")
        assert mul(pb("{1}"), pb("{2}")) == pb("{2,1}")

    def test_powers_and_units(self) -> None:
        assert power(pb("{1,1}"), Fraction(1, 2)) == pb("{1}")
        assert mul(pb("i{1}"), pb("i{1}")) == pb("-{1,1}")

    def test_bag_representations(self) -> None:
        product_bag = decbag_mul(DecBag.parse("{0,0}"), DecBag.parse("{1,0}"))
        assert product_bag == DecBag.parse("{1,1,0,0}")
        assert decbag_value(product_bag) == 22


# ===================================================================
# Partitions
# ===================================================================


@pytest.mark.timeout(30)
class TestPartitionIdentity:
    """Weight-n PBs are the partitions of n."""

    def test_counts_to_40(self) -> None:
        assert [partition_count(n) for n in range(1, 11)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
        for n in range(41):
            bags = enumerate_weight(n)
            assert len(bags) == partition_count(n)
            if n:
                assert sum(1 for b in bags if is_prime_pb(b)) == 1


@pytest.mark.timeout(5)
class TestHardyRamanujan:
    """P(n) over the leading asymptotic term."""

    def test_ratio(self) -> None:
        r50 = partition_count(50) / hr_estimate(50)
        r500 = partition_count(500) / hr_estimate(500)
        assert 0.88 <= r500 <= 1.0
        assert abs(1 - r500) < abs(1 - r50)


# ===================================================================
# Conversion and oracles
# ===================================================================


@pytest.mark.timeout(120)
class TestRoundTrip:
    """natural_to_pb then pb_to_rational is the identity."""

    def test_first_million(self) -> None:
        for n in range(1, 10**6 + 1):
            assert pb_to_rational(natural_to_pb(n)[0]) == n


@pytest.mark.timeout(60)
class TestOracleEquivalence:
    """Bag arithmetic agrees with integer and Fraction arithmetic."""

    def test_random_instances(self) -> None:
        rng = random.Random(20240601)
        for _ in range(10**4):
            x, y = rng.randint(1, 10**6), rng.randint(1, 10**6)
            a, b = natural_to_pb(x)[0], natural_to_pb(y)[0]
            e = rng.randint(-3, 3)
            assert pb_to_rational(mul(a, b)) == x * y
            assert pb_to_rational(div(a, b)) == Fraction(x, y)
            assert pb_to_rational(gcd(a, b)) == int_gcd(x, y)
            assert pb_to_rational(lcm(a, b)) == int_lcm(x, y)
            assert pb_to_rational(power(a, e)) == Fraction(x) ** e
            assert pb_to_rational(add(a, b)) == x + y
            assert pb_to_rational(sub(a, b)) == x - y


# ===================================================================
# Order, irrationality, Euler product
# ===================================================================


@pytest.mark.timeout(60)
class TestBertrandOrdering:
    """Doubling beats bumping, and the structural rules are sound."""

    def test_weight_12(self) -> None:
        bags = [b for n in range(13) for b in enumerate_weight(n)]
        for a in bags:
            doubled = mul(a, TWO)
            for k, _ in a.entries:
                assert exact_compare(doubled, increment_member(a, k)) is OrderResult.GREATER
        for a, b in product(bags, repeat=2):
            partial = partial_compare(a, b)
            if partial is not OrderResult.INCOMPARABLE:
                assert partial is exact_compare(a, b)


@pytest.mark.timeout(1)
class TestIrrationality:
    """Roots with no integer split."""

    @pytest.mark.parametrize(("base", "q"), [("{1}", Fraction(1, 2)), ("{1}", Fraction(1, 3)), ("{2}", Fraction(1, 3))])
    def test_roots(self, base: str, q: Fraction) -> None:
        with pytest.raises(IrrationalityError):
            power(pb(base), q, natural_output=True)
        root = power(pb(base), q)
        assert root == pb(f"{base[:-1]}:{q}}}")
        assert power(root, 1 / q) == pb(base)


@pytest.mark.timeout(30)
class TestEulerProduct:
    """The truncated product approaches pi**2 from below."""

    def test_ten_thousand_primes(self) -> None:
        value = euler_pi_squared(10**4)
        with mpmath.workdps(50):
            gap = mpmath.pi**2 - mpmath.mpf(value.numerator) / value.denominator
        assert 0 < gap < mpmath.mpf("1e-3")

    def test_monotone(self) -> None:
        values = [euler_pi_squared(k) for k in range(1, 301)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert euler_pi_squared(1000) < euler_pi_squared(10**4)


# ===================================================================
# Complexity slopes
# ===================================================================


@pytest.mark.timeout(300)
class TestComplexitySlopes:
    """Counter-based scaling over entry and digit ladders."""

    LADDER = [2**k for k in range(4, 13)]

    def test_pb_factor(self) -> None:
        assert slope(op="factor", distribution="random-pb-of-n-entries", sizes=self.LADDER) <= 1.3

    def test_pb_primality(self) -> None:
        assert abs(slope(op="primality", sizes=self.LADDER)) <= 0.1

    def test_multiplication(self) -> None:
        assert slope(op="mul", representation="positional", sizes=self.LADDER) >= 1.7
        assert slope(op="mul", representation="pb", sizes=self.LADDER) <= 1.2

    def test_gcd_and_factor_orderings(self) -> None:
        gcds = compare_representations(Operation.GCD, self.LADDER)
        assert gcds.get(Representation.PB).slope < gcds.get(Representation.POSITIONAL).slope
        factors = compare_representations(Operation.FACTOR, [4, 8, 12, 16, 20])
        assert factors.get(Representation.PB).slope < factors.get(Representation.POSITIONAL).slope

    def test_addition_via_conversion(self) -> None:
        pb_row = run_bench(BenchSpec(op="add", sizes=[10], repetitions=11)).series[0].rows[0]
        positional_row = run_bench(
            BenchSpec(op="add", representation="positional", sizes=[10], repetitions=11)
        ).series[0].rows[0]
        assert pb_row.counter >= 10 * positional_row.counter
