import json
import math
from dataclasses import replace

import numpy as np
import pytest
from conftest import constant_vol_config
from todjumps.detector import (
    DetectorConfig,
    detect_jumps,
    initial_raw_threshold,
    jump_sizes,
    modulus_of_continuity,
    round_thresholds,
)
from todjumps.exceptions import (
    ConfigurationError,
    DomainError,
    JumpDetectionWarning,
    StructuralError,
)
from todjumps.grid import ReturnGrid
from todjumps.simulator import (
    SimConfig,
    evaluate_detection,
    inject_jumps,
    simulate_path,
)
from todjumps.spotvol import (
    daily_spot_variance_closed_form,
    truncated_squares,
)
from todjumps.tod import cap_tod, expand_tod, tod_profile


def assert_rounds_consistent(report):
    """Per-round sets are disjoint and their union is the jump set."""
    seen = np.concatenate(
        [record.new_indices for record in report.rounds]
        + [np.zeros(0, dtype=np.int64)]
    )

    assert np.unique(seen).size == seen.size
    np.testing.assert_array_equal(np.sort(seen), report.jump_indices)
    assert report.rounds[-1].count == 0 or not report.converged


class TestConstants:
    """Modulus of continuity and thresholds."""

    def test_modulus_at_inverse_e(self):
        """log(1/delta) = 1 gives sqrt(2/e)."""
        assert modulus_of_continuity(1 / math.e) == pytest.approx(
            0.8578, abs=1e-4
        )

    def test_modulus_for_77_slots(self):
        assert modulus_of_continuity(1.0 / 19404) == pytest.approx(
            0.03190, abs=1e-5
        )

    def test_modulus_decreases_with_delta(self):
        for delta in (0.3, 0.01, 1e-4, 1e-6):
            assert modulus_of_continuity(delta / 2) < modulus_of_continuity(
                delta
            )

    @pytest.mark.parametrize("delta", [0.0, 1.0, 2.0])
    def test_modulus_domain(self, delta):
        with pytest.raises(DomainError):
            modulus_of_continuity(delta)

    def test_initial_raw_threshold(self):
        assert initial_raw_threshold(0.0, 0.01) == 0.0
        assert initial_raw_threshold(1.0, 1 / math.e) == pytest.approx(
            5.1466, abs=1e-4
        )

    def test_round_thresholds(self):
        """TOD and variance of one at delta = 1/e give 2 * sqrt(2/e)."""
        thresholds = round_thresholds(np.ones(3), np.ones(3), 1 / math.e)
        np.testing.assert_allclose(thresholds, [1.7156] * 3, atol=1e-4)

        zero = round_thresholds(np.ones(3), np.zeros(3), 1 / math.e)
        np.testing.assert_array_equal(zero, np.zeros(3))

    def test_round_thresholds_length_mismatch(self):
        with pytest.raises(StructuralError):
            round_thresholds(np.ones(3), np.ones(2), 0.01)


class TestDetectorConfig:
    """Validation of the procedure constants."""

    def test_defaults(self):
        config = DetectorConfig()

        assert config.raw_multiplier == 6.0
        assert config.round_multiplier == 2.0
        assert config.tod_cap == 1.5
        assert config.truncation_exponent == 0.49

    @pytest.mark.parametrize(
        "field, value",
        [
            ("raw_multiplier", 0.0),
            ("round_multiplier", -1.0),
            ("tod_cap", math.inf),
            ("max_rounds", 0),
            ("truncation_exponent", math.nan),
        ],
    )
    def test_invalid_values_name_the_field(self, field, value):
        with pytest.raises(ConfigurationError) as info:
            DetectorConfig(**{field: value})

        assert info.value.field == field

    def test_from_dict(self):
        config = DetectorConfig.from_dict({"tod_cap": 2.0})
        assert config == DetectorConfig(tod_cap=2.0)
        assert DetectorConfig.from_dict(config.to_dict()) == config

        with pytest.raises(ConfigurationError, match="cap"):
            DetectorConfig.from_dict({"cap": 2.0})


class TestJumpSizes:
    """Deterministic and randomized size estimates."""

    def grid(self):
        return ReturnGrid(np.array([0.05, 0.0]), 2, 1, 1.0 / 19404)

    def test_deterministic_example(self):
        """0.05 - 0.2 * sqrt(1/19404) is about 0.048564."""
        sizes = jump_sizes(self.grid(), np.full(2, 0.04), np.array([0]))
        assert sizes[0] == pytest.approx(0.048564, abs=1e-6)

    def test_zero_variance_returns_the_return(self):
        grid = self.grid()
        for mode in ("deterministic", "randomized"):
            sizes = jump_sizes(grid, np.zeros(2), np.array([0]), mode, 1)
            assert sizes[0] == 0.05

    def test_randomized_is_seeded(self):
        grid = self.grid()
        first = jump_sizes(
            grid, np.full(2, 0.04), np.array([0, 1]), "randomized", 9
        )
        second = jump_sizes(
            grid, np.full(2, 0.04), np.array([0, 1]), "randomized", 9
        )

        np.testing.assert_array_equal(first, second)

    def test_randomized_needs_a_seed(self):
        with pytest.raises(ConfigurationError) as info:
            jump_sizes(self.grid(), np.zeros(2), np.array([0]), "randomized")

        assert info.value.field == "seed"

    def test_index_out_of_range(self):
        with pytest.raises(StructuralError):
            jump_sizes(self.grid(), np.zeros(2), np.array([2]))

    def test_unknown_mode(self):
        with pytest.raises(ConfigurationError):
            jump_sizes(self.grid(), np.zeros(2), np.array([0]), "median")


class TestDetectJumps:
    """The recursive detection procedure."""

    def test_all_zero_returns(self):
        """Zero thresholds never fire under a strict comparison."""
        grid = ReturnGrid(np.zeros(154), 77, 2, 1.0 / 19404)

        with pytest.warns(JumpDetectionWarning, match="zero"):
            report = detect_jumps(grid)

        assert report.total == 0
        assert report.degenerate
        assert report.converged

    def test_constant_volatility_without_jumps(self, constant_vol_path):
        """No return reaches roughly 8.9 increment standard deviations."""
        report = detect_jumps(constant_vol_path.grid)

        assert report.total == 0
        assert report.converged
        assert report.round_counts == [0]

    def test_round_one_matches_a_direct_computation(self, jump_path):
        """Round one flags raw returns above the initial thresholds."""
        grid = jump_path.grid
        config = DetectorConfig()
        report = detect_jumps(grid, config)

        profile = cap_tod(tod_profile(grid), config.tod_cap)
        raw = initial_raw_threshold(profile.bar_alpha, grid.delta)
        sigmaq = daily_spot_variance_closed_form(
            grid, truncated_squares(grid.returns, raw)
        )
        thresholds = (
            2.0
            * expand_tod(profile, grid)
            * np.sqrt(np.repeat(sigmaq, grid.m))
            * modulus_of_continuity(grid.delta)
        )
        expected = np.flatnonzero(np.abs(grid.returns) > thresholds)

        np.testing.assert_allclose(
            report.rounds[0].thresholds, thresholds, rtol=1e-12
        )
        np.testing.assert_array_equal(report.rounds[0].new_indices, expected)
        assert report.raw_threshold == pytest.approx(raw)

    def test_round_bookkeeping(self, jump_path):
        report = detect_jumps(jump_path.grid)

        assert report.total > 0
        assert report.converged
        assert_rounds_consistent(report)
        assert sum(report.round_counts) == report.total
        np.testing.assert_array_equal(
            report.detection_round,
            [
                next(
                    r.number for r in report.rounds if index in r.new_indices
                )
                for index in report.jump_indices
            ],
        )

    def test_later_rounds_test_truncated_returns(self, jump_path):
        """A return kept by round k is tested in round k + 1."""
        report = detect_jumps(jump_path.grid)
        returns = jump_path.grid.returns

        for previous, current in zip(report.rounds, report.rounds[1:]):
            kept = np.abs(returns) <= previous.thresholds
            assert np.all(kept[current.new_indices])

    def test_injected_large_jumps_are_found(self, constant_vol_path):
        """Jumps far above the round-one threshold are all detected."""
        indices = np.array([100, 2000, 5000, 9000, 15000, 19000])
        sizes = np.array([0.05, -0.05, 0.06, -0.06, 0.05, -0.07])
        grid, truth = inject_jumps(constant_vol_path.grid, indices, sizes)

        report = detect_jumps(grid)

        assert set(truth.tolist()) <= set(report.jump_indices.tolist())
        assert_rounds_consistent(report)

    @pytest.mark.parametrize("factor", [0.1, 10.0])
    def test_scale_invariance(self, factor):
        """Scaling the returns leaves the detected indices unchanged."""
        for seed in range(10):
            grid = simulate_path(SimConfig(n_days=10, seed=seed)).grid

            np.testing.assert_array_equal(
                detect_jumps(grid.scaled(factor)).jump_indices,
                detect_jumps(grid).jump_indices,
            )

    @pytest.mark.filterwarnings("ignore::todjumps.JumpDetectionWarning")
    def test_larger_round_multiplier_flags_a_subset(self, jump_path):
        """Raising the multiplier only removes round-one detections."""
        previous = None
        for multiplier in (1.0, 1.5, 2.0, 3.0, 5.0):
            config = DetectorConfig(round_multiplier=multiplier, max_rounds=1)
            flagged = set(
                detect_jumps(jump_path.grid, config).jump_indices.tolist()
            )

            if previous is not None:
                assert flagged <= previous
            previous = flagged

    def test_round_limit_marks_the_report(self, jump_path):
        config = DetectorConfig(max_rounds=1)

        with pytest.warns(JumpDetectionWarning, match="converge"):
            report = detect_jumps(jump_path.grid, config)

        assert not report.converged
        assert len(report.rounds) == 1
        assert report.to_dict()["converged"] is False
        assert_rounds_consistent(report)

    def test_sizes_use_the_final_round_variance(self, jump_path):
        report = detect_jumps(jump_path.grid, seed=4)
        grid = jump_path.grid

        np.testing.assert_array_equal(
            report.size_sigmaq,
            np.repeat(report.rounds[-1].sigmaq.sigmaq_daily, grid.m),
        )
        np.testing.assert_allclose(
            report.sizes_deterministic,
            jump_sizes(grid, report.size_sigmaq, report.jump_indices),
        )
        assert report.sizes_randomized is not None
        assert report.sizes_randomized.shape == report.jump_indices.shape

    def test_randomized_sizes_need_a_seed(self, jump_path):
        assert detect_jumps(jump_path.grid).sizes_randomized is None

    def test_report_is_json_ready(self, jump_path):
        report = detect_jumps(jump_path.grid, seed=2)
        data = json.loads(json.dumps(report.to_dict(), allow_nan=False))

        assert data["total"] == report.total
        assert data["round_counts"] == report.round_counts
        assert data["jumps"][0]["index"] == int(report.jump_indices[0]) + 1
        assert "count" in data["analysis"]

        slim = report.to_dict(include_thresholds=False)
        assert slim["rounds"][0]["thresholds"] is None

    def test_jump_times_are_slot_ends(self, jump_path):
        report = detect_jumps(jump_path.grid)
        np.testing.assert_allclose(
            report.jump_times,
            jump_path.grid.delta * (report.jump_indices + 1),
        )

    def test_analysis(self, jump_path):
        report = detect_jumps(jump_path.grid)
        analysis = report.analysis()

        assert analysis["count"] == report.total
        assert analysis["mean_return"] == pytest.approx(
            np.mean(report.jump_returns)
        )
        assert analysis["mean_size_randomized"] is None

    @pytest.mark.slow
    def test_false_positives_at_full_scale(self):
        """370755 constant-volatility returns give at most two jumps."""
        path = simulate_path(constant_vol_config(n_days=370755 // 77, seed=1))
        assert path.grid.n == 370755

        assert detect_jumps(path.grid).total <= 2

    @pytest.mark.slow
    def test_recall_of_large_jumps(self):
        """Jumps three times above their round-one threshold are found."""
        found = 0
        large = 0
        for seed in range(20):
            path = simulate_path(SimConfig(seed=seed))
            report = detect_jumps(path.grid)

            thresholds = report.rounds[0].thresholds
            sizes = path.true_jump_sizes
            keep = np.abs(sizes) >= 3.0 * thresholds[path.true_jump_indices]

            detected = set(report.jump_indices.tolist())
            large += int(keep.sum())
            found += sum(
                int(i) in detected for i in path.true_jump_indices[keep]
            )

        assert large > 0
        assert found / large >= 0.95

    def test_detection_on_simulated_path_is_scored(self, jump_path):
        summary = evaluate_detection(jump_path, detect_jumps(jump_path.grid))

        assert summary.true_positives > 0
        assert summary.recall is not None


def test_detector_config_is_immutable():
    config = DetectorConfig()
    with pytest.raises(AttributeError):
        config.tod_cap = 2.0  # type: ignore[misc]
    assert replace(config, tod_cap=2.0).tod_cap == 2.0
