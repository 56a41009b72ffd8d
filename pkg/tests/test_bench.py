"""Tests for the counter-based benchmark harness."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from bench import (
    CSV_COLUMNS,
    BenchReport,
    BenchSpec,
    Distribution,
    Operation,
    ReportFormat,
    Representation,
    compare_representations,
    export_report,
    fit_slope,
    load_spec,
    run_bench,
    schoolbook_add,
    schoolbook_mul,
    write_report,
)
from errors import DomainError


def series_of(**spec) -> BenchReport:
    return run_bench(BenchSpec(**spec))


# ===================================================================
# BenchSpec
# ===================================================================


class TestBenchSpec:
    """Tests for BenchSpec validation."""

    def test_defaults(self) -> None:
        spec = BenchSpec(op="factor", sizes=[2, 4])
        assert spec.representation is Representation.PB
        assert spec.repetitions == 5
        assert spec.distribution is Distribution.SEMIPRIME

    def test_default_distribution_per_representation(self) -> None:
        assert BenchSpec(op="mul", sizes=[1]).distribution is Distribution.RANDOM_PB
        assert (
            BenchSpec(op="mul", representation="positional", sizes=[1]).distribution
            is Distribution.RANDOM_NATURAL
        )

    @pytest.mark.parametrize("sizes", [[], [4, 2], [2, 2], [0, 1]])
    def test_sizes_strictly_increasing_and_positive(self, sizes: list[int]) -> None:
        with pytest.raises(ValidationError):
            BenchSpec(op="mul", sizes=sizes)

    def test_at_least_five_repetitions(self) -> None:
        with pytest.raises(ValidationError):
            BenchSpec(op="mul", sizes=[1], repetitions=4)

    def test_unsupported_pair(self) -> None:
        with pytest.raises(ValidationError, match="not defined on decbag"):
            BenchSpec(op="gcd", representation="decbag", sizes=[1])

    def test_extra_fields_forbidden(self) -> None:
        with pytest.raises(ValidationError):
            BenchSpec(op="mul", sizes=[1], warmup=3)

    def test_load_spec(self, tmp_path) -> None:
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"op": "gcd", "representation": "positional", "sizes": [4, 8]}))
        spec = load_spec(path)
        assert spec.op is Operation.GCD
        assert spec.sizes == [4, 8]


# ===================================================================
# Counted positional arithmetic
# ===================================================================


class TestSchoolbook:
    """Tests for the digit-loop baselines."""

    @given(st.integers(0, 10**40), st.integers(0, 10**40))
    def test_mul_matches_int(self, a: int, b: int) -> None:
        product, work = schoolbook_mul(a, b)
        assert product == a * b
        assert work == len(str(a)) * len(str(b))

    @given(st.integers(0, 10**40), st.integers(0, 10**40))
    def test_add_matches_int(self, a: int, b: int) -> None:
        total, work = schoolbook_add(a, b)
        assert total == a + b
        assert work == max(len(str(a)), len(str(b)))

    def test_carries(self) -> None:
        assert schoolbook_mul(99, 99) == (9801, 4)
        assert schoolbook_add(999, 1) == (1000, 3)


# ===================================================================
# Slopes
# ===================================================================


class TestFitSlope:
    """Tests for the log-log fit."""

    def test_exact_power_law(self) -> None:
        slope, r2 = fit_slope([1, 10, 100], [5.0, 500.0, 50000.0])
        assert slope == pytest.approx(2.0)
        assert r2 == pytest.approx(1.0)

    def test_flat(self) -> None:
        assert fit_slope([10, 20, 40], [1.0, 1.0, 1.0]) == (0.0, 1.0)

    def test_single_point(self) -> None:
        assert fit_slope([10], [3.0]) == (None, None)


class TestScaling:
    """The harness recovers known exponents and the PB/positional contrasts."""

    @pytest.mark.parametrize("exponent", [1.0, 2.0])
    def test_calibration_slope(self, exponent: float) -> None:
        report = series_of(op="calibrate", sizes=[4, 16, 64], calibration_exponent=exponent)
        assert abs(report.series[0].slope - exponent) <= 0.15

    def test_pb_factor_is_linear_in_entries(self) -> None:
        report = series_of(op="factor", distribution="random-pb-of-n-entries", sizes=[4, 8, 16, 32])
        assert report.series[0].slope <= 1.3

    def test_pb_primality_is_constant(self) -> None:
        report = series_of(op="primality", sizes=[20, 30, 40])
        assert report.series[0].slope == pytest.approx(0.0, abs=0.1)

    def test_multiplication_contrast(self) -> None:
        positional = series_of(op="mul", representation="positional", sizes=[8, 16, 32, 64])
        pb = series_of(op="mul", representation="pb", sizes=[8, 16, 32, 64])
        assert positional.series[0].slope >= 1.7
        assert pb.series[0].slope <= 1.2

    def test_positional_primality_counts_squarings(self) -> None:
        report = series_of(op="primality", representation="positional", sizes=[25, 35, 45])
        counters = [row.counter for row in report.series[0].rows]
        assert counters == sorted(counters)
        assert 0.8 <= report.series[0].slope <= 1.3

    def test_pb_addition_pays_for_conversion(self) -> None:
        pb = series_of(op="add", sizes=[10])
        positional = series_of(op="add", representation="positional", sizes=[10])
        assert pb.series[0].rows[0].counter >= 10 * positional.series[0].rows[0].counter

    def test_deterministic_by_seed(self) -> None:
        spec = {"op": "gcd", "representation": "positional", "sizes": [8, 16], "seed": 7}
        first = [row.counter for row in series_of(**spec).series[0].rows]
        second = [row.counter for row in series_of(**spec).series[0].rows]
        assert first == second

    def test_rows_record_value_digits(self) -> None:
        report = series_of(op="mul", representation="positional", sizes=[12])
        assert report.series[0].rows[0].value_digits == 12


class TestCompareRepresentations:
    """Tests for compare_representations."""

    def test_one_series_per_representation(self) -> None:
        report = compare_representations(Operation.GCD, [4, 8])
        assert [s.representation for s in report.series] == ["pb", "positional"]
        assert report.get(Representation.POSITIONAL).rows[0].size == 4
        assert report.complete

    def test_pb_gcd_scales_below_positional(self) -> None:
        report = compare_representations(Operation.GCD, [8, 16, 32, 64])
        pb, positional = report.get(Representation.PB), report.get(Representation.POSITIONAL)
        assert pb.slope <= 1.2
        assert positional.slope >= 1.5
        assert pb.slope < positional.slope

    def test_pb_factor_scales_below_conversion(self) -> None:
        report = compare_representations(Operation.FACTOR, [4, 8, 12, 16])
        pb, positional = report.get(Representation.PB), report.get(Representation.POSITIONAL)
        assert pb.slope == pytest.approx(0.0, abs=0.1)
        assert positional.slope > 1.0
        assert pb.slope < positional.slope

    def test_calibrate_rejected(self) -> None:
        with pytest.raises(DomainError):
            compare_representations(Operation.CALIBRATE, [4, 8])


class TestResourceCeilings:
    """A ceiling ends the ladder and flags the report."""

    def test_incomplete_report(self, set_env, caplog: pytest.LogCaptureFixture) -> None:
        set_env(mulbag_member_cap=2)
        report = series_of(op="mul", representation="mulbag", sizes=[2, 4])
        assert not report.complete
        assert report.series[0].rows == []
        assert report.series[0].slope is None
        assert "stopped at size 2" in caplog.text


# ===================================================================
# Export
# ===================================================================


class TestExport:
    """Tests for CSV and JSONL export."""

    @pytest.fixture
    def report(self) -> BenchReport:
        return series_of(op="mul", representation="positional", sizes=[4, 8])

    def test_csv(self, report: BenchReport) -> None:
        lines = export_report(report).decode().splitlines()
        assert lines[0] == "op,repr,size,counter,wall_ns,slope,r2"
        assert len(lines) == 3
        assert lines[1].startswith("mul,positional,4,16,")

    def test_jsonl(self, report: BenchReport) -> None:
        records = [json.loads(line) for line in export_report(report, ReportFormat.JSONL).splitlines()]
        assert [list(r) for r in records] == [list(CSV_COLUMNS)] * 2
        assert records[1]["size"] == "8"
        assert records[1]["slope"] == "2"

    def test_write_report(self, report: BenchReport, tmp_path) -> None:
        path = tmp_path / "out.csv"
        write_report(report, path)
        assert path.read_bytes() == export_report(report)
