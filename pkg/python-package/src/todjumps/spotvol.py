"""
Daily spot variance from truncated squared returns.

The estimate for day ``j`` anchors a delta sequence at the time of the day's
first return and sums the weighted truncated squared returns:

    sigma2(j) = sum_l f_n(t_l - t_anchor(j)) * truncated_sq(l)

With the indicator kernel and a one-day bandwidth this is the day's
truncated realized variance divided by the length of a day in years.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np
from todjumps.exceptions import DomainError, StructuralError
from todjumps.grid import DEFAULT_SLOTS_PER_DAY, ReturnGrid, default_delta
from todjumps.kernels import DeltaSequence, IndicatorDeltaSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpotVolSeries:
    """
    Per-day annualized squared volatility estimates.

    Parameters
    ----------
    sigmaq_daily : numpy.ndarray of float
        One non-negative estimate per day, in units of variance per year.

    bandwidth_slots : int
        Window length of the delta sequence, in slots.

    kernel : str
        Name of the delta sequence that produced the estimates.
    """

    sigmaq_daily: np.ndarray
    bandwidth_slots: int
    kernel: str = "indicator"

    @property
    def n_days(self) -> int:
        return int(self.sigmaq_daily.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.kernel,
            "bandwidth_slots": self.bandwidth_slots,
            "sigma_sq_annualized": self.sigmaq_daily.tolist(),
        }


def default_fn0(m: int, delta: float) -> float:
    """``1 / (m * delta)``: the indicator sequence's height for a window of m
    slots."""
    return 1.0 / (m * delta)


def delta_sequence_weight(
    x: Union[float, np.ndarray],
    fn0: Optional[float] = None,
    m: int = DEFAULT_SLOTS_PER_DAY,
    delta: Optional[float] = None,
) -> Union[float, np.ndarray]:
    """
    Indicator delta sequence ``fn0 * 1{0 <= x * fn0 < 1}``.

    Parameters
    ----------
    x : float or numpy.ndarray
        Time offset(s) from the anchor, in years.

    fn0 : float, optional
        Height of the sequence. Defaults to ``1 / (m * delta)``, one trading
        day of bandwidth.

    m : int
        Slots per day, used only when ``fn0`` is omitted.

    delta : float, optional
        Slot length in years, used only when ``fn0`` is omitted. Defaults to
        ``1 / (252 * m)``.
    """
    if fn0 is None:
        fn0 = default_fn0(m, default_delta(m) if delta is None else delta)

    weights = IndicatorDeltaSequence().weights(np.asarray(x), fn0)

    if np.ndim(x) == 0:
        return float(weights)
    return weights


def truncated_squares(
    returns: np.ndarray, threshold: Union[float, np.ndarray]
) -> np.ndarray:
    """``r_j ** 2`` where ``|r_j| <= threshold_j`` and zero elsewhere."""
    returns = np.asarray(returns, dtype=np.float64)
    return np.where(np.abs(returns) <= threshold, np.square(returns), 0.0)


def daily_spot_variance(
    grid: ReturnGrid,
    truncated_sq: np.ndarray,
    kernel: Optional[DeltaSequence] = None,
    bandwidth_slots: Optional[int] = None,
) -> SpotVolSeries:
    """
    Estimates the average squared volatility of every day.

    Parameters
    ----------
    grid : ReturnGrid
        Supplies the time grid and day layout.

    truncated_sq : numpy.ndarray of float
        ``n`` non-negative truncated squared returns.

    kernel : DeltaSequence, optional
        Delta sequence to weight with. Defaults to the indicator sequence.

    bandwidth_slots : int, optional
        Bandwidth in slots. Defaults to ``m`` (one day). Weights are used as
        they are, without renormalizing windows that run past the sample.

    Returns
    -------
    series : SpotVolSeries
        One estimate per day.
    """
    truncated_sq = np.asarray(truncated_sq, dtype=np.float64)
    if truncated_sq.size != grid.n:
        raise StructuralError(
            f"expected {grid.n} truncated squared returns, "
            f"got {truncated_sq.size}"
        )
    if np.any(truncated_sq < 0):
        raise DomainError("truncated squared returns must be non-negative")

    if kernel is None:
        kernel = IndicatorDeltaSequence()
    if bandwidth_slots is None:
        bandwidth_slots = grid.m
    if bandwidth_slots < 1:
        raise DomainError(
            f"bandwidth_slots must be positive, got {bandwidth_slots}"
        )

    fn0 = default_fn0(bandwidth_slots, grid.delta)
    support = kernel.support(fn0)

    sigmaq = np.empty(grid.n_days, dtype=np.float64)
    for day in range(grid.n_days):
        anchor = day * grid.m

        if support is None:
            lo, hi = 0, grid.n
        else:
            lo = max(0, anchor + math.floor(support[0] / grid.delta) - 1)
            hi = min(grid.n, anchor + math.ceil(support[1] / grid.delta) + 2)

        # Offsets are t_l - t_anchor with t_l = delta * (l + 1)
        offsets = (np.arange(lo, hi) - anchor) * grid.delta
        weights = kernel.weights(offsets, fn0)
        sigmaq[day] = float(np.dot(weights, truncated_sq[lo:hi]))

    logger.debug(
        "Estimated %d daily variances with %s kernel, bandwidth %d slots",
        grid.n_days,
        kernel.name,
        bandwidth_slots,
    )

    return SpotVolSeries(sigmaq, bandwidth_slots, kernel.name)


def daily_spot_variance_closed_form(
    grid: ReturnGrid, truncated_sq: np.ndarray
) -> np.ndarray:
    """Per-day ``(1 / (m * delta)) * sum`` of the day's truncated squares."""
    truncated_sq = np.asarray(truncated_sq, dtype=np.float64)
    if truncated_sq.size != grid.n:
        raise StructuralError(
            f"expected {grid.n} truncated squared returns, "
            f"got {truncated_sq.size}"
        )

    day_sums = truncated_sq.reshape(grid.n_days, grid.m).sum(axis=1)
    return day_sums / (grid.m * grid.delta)


def expand_daily(series: SpotVolSeries, grid: ReturnGrid) -> np.ndarray:
    """Assigns each day's estimate to every slot of that day."""
    if series.n_days != grid.n_days:
        raise StructuralError(
            f"series has {series.n_days} days, grid has {grid.n_days}"
        )

    return np.repeat(series.sigmaq_daily, grid.m)
