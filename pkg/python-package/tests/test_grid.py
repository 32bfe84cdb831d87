import math

import numpy as np
import pytest
from conftest import write_lines
from todjumps.exceptions import DomainError, InputDataError, StructuralError
from todjumps.grid import (
    ReturnGrid,
    default_delta,
    load_prices,
    load_returns,
    prices_to_log_returns,
)


class TestReturnGrid:
    """Construction and layout helpers of ReturnGrid."""

    def test_default_delta_is_one_slot_of_a_252_day_year(self):
        """The default slot length for m=77 is 1/19404 years."""
        assert default_delta(77) == pytest.approx(1.0 / 19404)

    def test_rejects_length_mismatch(self):
        """A return count different from m * n_days is structural."""
        with pytest.raises(StructuralError, match="expected 6 returns"):
            ReturnGrid(np.zeros(5), 3, 2, 0.001)

    def test_rejects_single_slot_days(self):
        """Bipower variation needs at least two slots per day."""
        with pytest.raises(DomainError):
            ReturnGrid(np.zeros(3), 1, 3, 0.001)

    def test_rejects_non_finite_values_with_their_index(self):
        """The first non-finite return is reported by index."""
        with pytest.raises(DomainError, match="index 2"):
            ReturnGrid(np.array([0.0, 1.0, np.inf, 0.0]), 2, 2, 0.001)

    def test_returns_are_read_only(self):
        """The stored array cannot be modified in place."""
        grid = ReturnGrid(np.zeros(4), 2, 2, 0.001)
        with pytest.raises(ValueError):
            grid.returns[0] = 1.0

    def test_from_matrix_and_day_block(self):
        """Rows of the matrix become days in day-major order."""
        grid = ReturnGrid.from_matrix(np.arange(6.0).reshape(2, 3))

        assert (grid.m, grid.n_days) == (3, 2)
        assert grid.delta == pytest.approx(default_delta(3))
        np.testing.assert_array_equal(grid.day_block(1), [3.0, 4.0, 5.0])
        np.testing.assert_array_equal(grid.day_of(np.array([2, 3])), [0, 1])
        np.testing.assert_array_equal(grid.slot_of(np.array([2, 3])), [2, 0])

    def test_times_are_right_slot_ends(self):
        """Observation j (1-based) sits at delta * j."""
        grid = ReturnGrid(np.zeros(4), 2, 2, 0.25)
        np.testing.assert_allclose(grid.times, [0.25, 0.5, 0.75, 1.0])

    def test_permute_days_moves_whole_days(self):
        """Days are reordered as blocks."""
        grid = ReturnGrid.from_matrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_array_equal(
            grid.permute_days([1, 0]).returns, [3.0, 4.0, 1.0, 2.0]
        )
        with pytest.raises(StructuralError):
            grid.permute_days([0, 0])


class TestLoadReturns:
    """Reading return files."""

    def test_two_days_of_77_returns(self, tmp_path):
        """154 finite values with m=77 give a grid of two days."""
        path = tmp_path / "returns.txt"
        write_lines(path, np.linspace(-0.01, 0.01, 154))

        grid = load_returns(path, m=77)

        assert grid.n_days == 2
        assert grid.n == 154
        assert grid.delta == pytest.approx(1.0 / 19404)

    def test_count_not_divisible_by_m_names_the_remainder(self, tmp_path):
        """100 values with m=77 leave a remainder of 23."""
        path = tmp_path / "returns.txt"
        write_lines(path, np.zeros(100))

        with pytest.raises(StructuralError, match="remainder 23"):
            load_returns(path, m=77)

    def test_nan_entry_is_reported_at_its_index(self, tmp_path):
        """A literal NaN is rejected with its index and line."""
        path = tmp_path / "returns.txt"
        write_lines(path, ["0.1", "NaN", "0.2", "0.3"])

        with pytest.raises(InputDataError, match="line 2") as info:
            load_returns(path, m=2)

        assert info.value.index == 1
        assert "non-finite" in str(info.value)

    def test_non_numeric_entry(self, tmp_path):
        """Text that is not a number is rejected."""
        path = tmp_path / "returns.txt"
        write_lines(path, ["0.1", "0.2", "abc", "0.3"])

        with pytest.raises(InputDataError, match="non-numeric") as info:
            load_returns(path, m=2)

        assert info.value.index == 2

    def test_seventeen_digit_text_loads_exactly(self, tmp_path, rng):
        """Values written with 17 significant digits load bit for bit."""
        values = rng.normal(scale=0.002, size=770)
        path = tmp_path / "returns.txt"
        write_lines(path, [f"{v:.17g}" for v in values])

        grid = load_returns(path, m=77)

        np.testing.assert_array_equal(grid.returns, values)

    def test_extra_field_is_reported_with_its_line(self, tmp_path):
        """A line with two fields is an input error, not a parser crash."""
        path = tmp_path / "returns.txt"
        path.write_text("0.1\n0.2,9\n0.3\n0.4\n", encoding="utf-8")

        with pytest.raises(InputDataError, match="line 2") as info:
            load_returns(path, m=2)

        assert info.value.line == 2

    def test_empty_file_is_structural(self, tmp_path):
        """A file without records cannot form a grid."""
        path = tmp_path / "returns.txt"
        path.write_text("", encoding="utf-8")

        with pytest.raises(StructuralError):
            load_returns(path, m=2)

    def test_price_layout(self, tmp_path):
        """The prices layout delegates to load_prices."""
        path = tmp_path / "prices.csv"
        path.write_text("d1,1\nd1,2\nd1,4\n", encoding="utf-8")

        grid = load_returns(path, m=2, layout="prices")

        np.testing.assert_allclose(grid.returns, [math.log(2)] * 2)


class TestPrices:
    """Price to return conversion."""

    def test_log_identities(self):
        """Prices [1, e, e] give returns [1, 0]."""
        grid = prices_to_log_returns([[1.0, math.e, math.e]])

        np.testing.assert_allclose(grid.returns, [1.0, 0.0], atol=1e-15)
        assert (grid.m, grid.n_days) == (2, 1)

    def test_constant_prices_give_zero_returns(self):
        """Two constant days yield four zero returns."""
        grid = prices_to_log_returns([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])

        assert grid.n_days == 2
        np.testing.assert_array_equal(grid.returns, np.zeros(4))

    def test_zero_price_is_a_domain_error(self):
        """The log of a zero price is undefined."""
        with pytest.raises(DomainError):
            prices_to_log_returns([[1.0, 0.0, 2.0]])

    def test_unequal_blocks_are_structural(self):
        """Every day must carry the same number of prices."""
        with pytest.raises(StructuralError):
            prices_to_log_returns([[1.0, 2.0, 3.0], [1.0, 2.0]])

    def test_returns_never_span_days(self, tmp_path):
        """The jump between two days' prices is not a return."""
        path = tmp_path / "prices.csv"
        path.write_text(
            "2020-01-02,100\n2020-01-02,100\n2020-01-02,100\n"
            "2020-01-03,200\n2020-01-03,200\n2020-01-03,200\n",
            encoding="utf-8",
        )

        grid = load_prices(path)

        np.testing.assert_array_equal(grid.returns, np.zeros(4))

    def test_day_ids_out_of_order(self, tmp_path):
        """A day id reappearing after another day is rejected."""
        path = tmp_path / "prices.csv"
        path.write_text("a,1\nb,1\na,1\n", encoding="utf-8")

        with pytest.raises(InputDataError, match="line 3"):
            load_prices(path)

    def test_decreasing_day_ids(self, tmp_path):
        """Day 1 after day 2 is rejected at the first line of day 1."""
        path = tmp_path / "prices.csv"
        path.write_text(
            "2,1\n2,1.1\n2,1.2\n1,1\n1,1.1\n1,1.2\n", encoding="utf-8"
        )

        with pytest.raises(InputDataError, match="line 4"):
            load_prices(path)

    def test_numeric_day_ids_compare_as_numbers(self, tmp_path):
        """Day 10 follows day 9 even though "10" < "9" as text."""
        path = tmp_path / "prices.csv"
        path.write_text("9,1\n9,2\n9,4\n10,1\n10,2\n10,4\n", encoding="utf-8")

        grid = load_prices(path)

        assert (grid.m, grid.n_days) == (2, 2)

    def test_cumulated_returns_reproduce_prices(self, rng):
        """p0 * exp(cumsum(r)) gives back every price of the day."""
        blocks = np.exp(rng.normal(scale=0.01, size=(5, 78)).cumsum(axis=1))
        blocks *= 100.0

        grid = prices_to_log_returns(blocks)

        rebuilt = blocks[:, :1] * np.exp(np.cumsum(grid.as_matrix(), axis=1))
        np.testing.assert_allclose(rebuilt, blocks[:, 1:], rtol=1e-12)
