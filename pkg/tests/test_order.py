"""Tests for partial, exact and signed ordering and the log enclosures."""

import logging
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings as hsettings

from convert import rational_to_pb
from errors import DomainError, ModeError
from order import (
    LogEnclosure,
    OrderResult,
    compare,
    exact_compare,
    increment_member,
    log_value,
    partial_compare,
    signed_compare,
)
from partition import enumerate_weight
from pbnum import INFINITY, ONE, TWO, ZERO, PrimeBag, mul, validate
from tests.helpers import positive_fractions, rational_bags, value_of


def pb(text: str) -> PrimeBag:
    return validate(text)


def weights_up_to(n: int) -> list[PrimeBag]:
    return [bag for w in range(n + 1) for bag in enumerate_weight(w)]


def value_order(a: PrimeBag, b: PrimeBag) -> OrderResult:
    va, vb = value_of(a), value_of(b)
    if va < vb:
        return OrderResult.LESS
    return OrderResult.GREATER if va > vb else OrderResult.EQUAL


# ===================================================================
# OrderResult
# ===================================================================


class TestOrderResult:
    """Tests for the OrderResult enum."""

    def test_flipped(self) -> None:
        assert OrderResult.LESS.flipped() is OrderResult.GREATER
        assert OrderResult.EQUAL.flipped() is OrderResult.EQUAL
        assert OrderResult.INCOMPARABLE.flipped() is OrderResult.INCOMPARABLE

    def test_symbols(self) -> None:
        assert [r.symbol for r in OrderResult] == ["<", "=", ">", "?"]


# ===================================================================
# Partial order
# ===================================================================


class TestPartialCompare:
    """Tests for the structural rules."""

    @pytest.mark.parametrize(
        ("a", "b", "expected"),
        [
            ("{1}", "{2,1}", OrderResult.LESS),
            ("{2,1,1}", "{3,1}", OrderResult.GREATER),
            ("{2,2}", "{3,1}", OrderResult.INCOMPARABLE),
            ("{3,1}", "{3,1}", OrderResult.EQUAL),
            ("{1,1}", "{2}", OrderResult.GREATER),
        ],
    )
    def test_examples(self, a: str, b: str, expected: OrderResult) -> None:
        assert partial_compare(pb(a), pb(b)) is expected
        assert partial_compare(pb(b), pb(a)) is expected.flipped()

    def test_needs_naturals(self) -> None:
        with pytest.raises(ModeError):
            partial_compare(pb("{-1}"), pb("{1}"))

    def test_never_contradicts_exact_order_weight_8(self) -> None:
        bags = weights_up_to(8)
        for a, b in product(bags, repeat=2):
            partial = partial_compare(a, b)
            if partial is not OrderResult.INCOMPARABLE:
                assert partial is exact_compare(a, b), (a, b)


# ===================================================================
# Exact order
# ===================================================================


class TestExactCompare:
    """Tests for the precision ladder."""

    @pytest.mark.parametrize(
        ("a", "b", "expected"),
        [
            ("{2,2}", "{3,1}", OrderResult.LESS),
            ("{3,2}", "{4,1}", OrderResult.GREATER),
            ("{1:1/2}", "{}", OrderResult.GREATER),
            ("{1,-2}", "{-1}", OrderResult.GREATER),
            ("{2,1}", "{2,1}", OrderResult.EQUAL),
        ],
    )
    def test_examples(self, a: str, b: str, expected: OrderResult) -> None:
        assert exact_compare(pb(a), pb(b)) is expected

    def test_imaginary_rejected(self) -> None:
        with pytest.raises(DomainError, match="imaginary"):
            exact_compare(pb("i{1}"), pb("{1}"))

    def test_signs_and_specials_rejected(self) -> None:
        with pytest.raises(DomainError, match="signed_compare"):
            exact_compare(pb("-{1}"), pb("{1}"))
        with pytest.raises(DomainError):
            exact_compare(INFINITY, pb("{1}"))

    def test_close_values_climb_the_ladder(
        self, set_env, caplog: pytest.LogCaptureFixture
    ) -> None:
        """3**665 and 2**1054 agree to about 7 significant digits in log."""
        set_env(ladder_start_bits=16)
        a = PrimeBag.from_entries({2: 665})
        b = PrimeBag.from_entries({1: 1054})
        with caplog.at_level(logging.DEBUG, logger="order"):
            assert exact_compare(a, b) is OrderResult.GREATER
            assert exact_compare(b, a) is OrderResult.LESS
        assert 3**665 > 2**1054
        assert "at 16 bits" in caplog.text

    def test_ladder_exhaustion_falls_back_to_integers(
        self, set_env, caplog: pytest.LogCaptureFixture
    ) -> None:
        set_env(ladder_start_bits=16, ladder_cap_bits=16)
        a = PrimeBag.from_entries({2: Fraction(665, 7)})
        b = PrimeBag.from_entries({1: Fraction(1054, 7)})
        with caplog.at_level(logging.INFO, logger="order"):
            assert exact_compare(a, b) is OrderResult.GREATER
        assert "exhausted" in caplog.text

    def test_agrees_with_rational_oracle(self) -> None:
        bags = weights_up_to(6)
        for a, b in product(bags, repeat=2):
            assert exact_compare(a, b) is value_order(a, b)

    @given(positive_fractions(), positive_fractions())
    @hsettings(max_examples=200)
    def test_random_rationals(self, p: Fraction, q: Fraction) -> None:
        a, b = rational_to_pb(p), rational_to_pb(q)
        expected = OrderResult.LESS if p < q else OrderResult.GREATER if p > q else OrderResult.EQUAL
        assert exact_compare(a, b) is expected

    def test_antisymmetric_and_transitive_weight_6(self) -> None:
        bags = sorted(weights_up_to(6), key=value_of)
        for a, b in zip(bags, bags[1:]):
            assert exact_compare(a, b) is OrderResult.LESS
            assert exact_compare(b, a) is OrderResult.GREATER


class TestBertrandRule:
    """Rule 1 (double) always beats Rule 2 (bump one member)."""

    def test_rule1_beats_rule2_weight_8(self) -> None:
        for a in weights_up_to(8):
            doubled = mul(a, TWO)
            for k, _ in a.entries:
                assert exact_compare(doubled, increment_member(a, k)) is OrderResult.GREATER
                assert partial_compare(doubled, increment_member(a, k)) is OrderResult.GREATER

    def test_singleton_is_smallest_of_its_weight(self) -> None:
        for n in range(1, 11):
            bags = enumerate_weight(n)
            singleton = PrimeBag.prime(n)
            assert all(
                exact_compare(singleton, other) is OrderResult.LESS
                for other in bags
                if other != singleton
            )


# ===================================================================
# Signed order
# ===================================================================


class TestSignedCompare:
    """Tests for the total order over signs, zero and infinity."""

    @pytest.mark.parametrize(
        ("a", "b", "expected"),
        [
            ("-{1}", "0", OrderResult.LESS),
            ("0", "{-3}", OrderResult.LESS),
            ("{5,5}", "inf", OrderResult.LESS),
            ("-{1}", "-{2}", OrderResult.GREATER),
            ("0", "0", OrderResult.EQUAL),
            ("inf", "inf", OrderResult.EQUAL),
            ("{2}", "{1}", OrderResult.GREATER),
        ],
    )
    def test_examples(self, a: str, b: str, expected: OrderResult) -> None:
        assert signed_compare(pb(a), pb(b)) is expected

    def test_imaginary_rejected(self) -> None:
        with pytest.raises(DomainError):
            signed_compare(pb("i{1}"), ZERO)

    @given(rational_bags(), rational_bags())
    @hsettings(max_examples=200)
    def test_matches_values(self, a: PrimeBag, b: PrimeBag) -> None:
        assert signed_compare(a, b) is value_order(a, b)

    def test_compare_pair(self) -> None:
        assert compare(pb("{2,2}"), pb("{3,1}")) == (OrderResult.INCOMPARABLE, OrderResult.LESS)
        assert compare(pb("-{1}"), ONE) == (OrderResult.INCOMPARABLE, OrderResult.LESS)


# ===================================================================
# Log enclosures
# ===================================================================


class TestLogValue:
    """Tests for rigorous log enclosures."""

    def test_one_encloses_zero(self) -> None:
        enclosure = log_value(ONE)
        assert 0 in enclosure
        assert enclosure.sign() == 0

    def test_ln2(self) -> None:
        enclosure = log_value(pb("{1}"), precision=128)
        with mpmath.workdps(50):
            assert mpmath.log(2) in enclosure
        assert enclosure.width <= mpmath.ldexp(1, -126)

    def test_ln6(self) -> None:
        enclosure = log_value(pb("{2,1}"))
        with mpmath.workdps(50):
            assert mpmath.log(2) + mpmath.log(3) in enclosure
        assert enclosure.sign() == 1

    def test_reciprocal_is_negative(self) -> None:
        assert log_value(pb("{-2}")).sign() == -1

    def test_width_bound_holds_for_large_bags(self) -> None:
        bag = PrimeBag.from_entries({k: k for k in range(1, 200)})
        enclosure = log_value(bag, precision=64)
        assert enclosure.width <= mpmath.ldexp(1, -63) * abs(enclosure.midpoint)

    def test_specials_are_sentinels(self) -> None:
        assert log_value(ZERO).lower == mpmath.mpf("-inf")
        assert log_value(INFINITY).upper == mpmath.mpf("inf")
        assert log_value(ZERO).width == 0

    def test_negative_rejected(self) -> None:
        with pytest.raises(DomainError):
            log_value(pb("-{1}"))

    def test_midpoint(self) -> None:
        enclosure = LogEnclosure(mpmath.mpf(0), mpmath.mpf(1), 64)
        assert enclosure.midpoint == mpmath.mpf("0.5")
