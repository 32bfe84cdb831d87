"""
Time-of-day (TOD) volatility factors.

The factor of slot ``i`` is ``TOD(i) = NOI(i) * numerTOD(i) / denTOD`` where,
after truncating every return with the raw threshold
``bar_alpha * (1 / m) ** exponent``,

* ``numerTOD(i)`` sums the squared truncated returns of slot ``i`` over days,
* ``denTOD`` is the realized variance of the whole sample,
* ``NOI(i) = numNOI / denNOI(i)``, with ``numNOI`` the number of returns kept
  by the truncation and ``denNOI(i)`` the number of days on which slot ``i``
  was kept.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import numpy as np
from todjumps.exceptions import (
    DegenerateInputError,
    DomainError,
    JumpDetectionWarning,
    StructuralError,
)
from todjumps.grid import ReturnGrid

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION_EXPONENT = 0.49
DEFAULT_TOD_CAP = 1.5

# 3 * sqrt(pi / 2), the scale applied to the root mean daily BPV
_BAR_ALPHA_SCALE = 3.0 * math.sqrt(math.pi / 2.0)


@dataclass(frozen=True, eq=False)
class TodProfile:
    """
    Per-slot TOD factors and the quantities they were built from.

    Slots where ``den_noi`` is zero have no defined factor: ``tod`` holds NaN
    there and ``undefined_slots`` is True until :func:`cap_tod` substitutes
    the cap.
    """

    tod: np.ndarray
    bar_alpha: float
    den_noi: np.ndarray
    num_noi: int
    den_tod: float
    numer_tod: np.ndarray
    undefined_slots: np.ndarray
    exponent: float = DEFAULT_TRUNCATION_EXPONENT
    cap: Optional[float] = None

    @property
    def m(self) -> int:
        return int(self.tod.size)

    @property
    def noi(self) -> np.ndarray:
        """``numNOI / denNOI(i)``, NaN where the slot is undefined."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(
                self.den_noi > 0, self.num_noi / self.den_noi, np.nan
            )

    @property
    def is_defined(self) -> bool:
        return not bool(np.any(np.isnan(self.tod)))

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready representation; slots are reported 1-based."""
        return {
            "m": self.m,
            "bar_alpha": self.bar_alpha,
            "tod": [None if np.isnan(v) else float(v) for v in self.tod],
            "undefined_slots": [
                int(i) + 1 for i in np.flatnonzero(self.undefined_slots)
            ],
            "num_noi": self.num_noi,
            "den_tod": self.den_tod,
            "den_noi": [int(v) for v in self.den_noi],
            "exponent": self.exponent,
            "cap": self.cap,
        }


def bipower_variation_day(day_returns: np.ndarray) -> float:
    """
    Bipower variation ``sum_{j>=2} |r_j| * |r_{j-1}|`` of a single day.

    Raises
    ------
    DomainError
        If fewer than two returns are given.
    """
    abs_returns = np.abs(np.asarray(day_returns, dtype=np.float64))
    if abs_returns.size < 2:
        raise DomainError(
            f"bipower variation needs at least 2 returns, "
            f"got {abs_returns.size}"
        )

    return float(np.sum(abs_returns[1:] * abs_returns[:-1]))


def daily_bipower_variation(grid: ReturnGrid) -> np.ndarray:
    """BPV of every day of the grid; products never span two days."""
    abs_returns = np.abs(grid.as_matrix())
    return np.sum(abs_returns[:, 1:] * abs_returns[:, :-1], axis=1)


def bar_alpha(grid: ReturnGrid) -> float:
    """
    Raw average daily volatility level,
    ``3 * sqrt(pi / 2) * sqrt(mean_s BPV_s)``.

    The result is dimensionless and homogeneous of degree one in the returns.
    """
    mean_bpv = float(np.sum(daily_bipower_variation(grid))) / grid.n_days
    return _BAR_ALPHA_SCALE * math.sqrt(mean_bpv)


def raw_truncation_threshold(
    bar_alpha: float, m: int, exponent: float = DEFAULT_TRUNCATION_EXPONENT
) -> float:
    """``bar_alpha * (1 / m) ** exponent``."""
    return bar_alpha * (1.0 / m) ** exponent


def raw_truncation_mask(
    grid: ReturnGrid,
    bar_alpha: float,
    exponent: float = DEFAULT_TRUNCATION_EXPONENT,
) -> np.ndarray:
    """
    Flags the returns that are kept by the raw truncation.

    Parameters
    ----------
    grid : ReturnGrid
        Returns to truncate.

    bar_alpha : float
        Raw volatility level, see :func:`bar_alpha`.

    exponent : float
        Power applied to ``1 / m`` in the threshold.

    Returns
    -------
    mask : numpy.ndarray of bool
        True where ``|r_j| <= bar_alpha * (1 / m) ** exponent``.
    """
    if bar_alpha < 0:
        raise DomainError(f"bar_alpha must be non-negative, got {bar_alpha}")

    threshold = raw_truncation_threshold(bar_alpha, grid.m, exponent)
    return np.abs(grid.returns) <= threshold


def realized_variance(grid: ReturnGrid) -> float:
    """Sum of all squared returns of the sample."""
    return float(np.sum(np.square(grid.returns)))


def tod_profile(
    grid: ReturnGrid, exponent: float = DEFAULT_TRUNCATION_EXPONENT
) -> TodProfile:
    """
    Estimates the TOD factor of every intraday slot.

    Parameters
    ----------
    grid : ReturnGrid
        Return panel; at least one return must be non-zero.

    exponent : float
        Exponent of the raw truncation threshold.

    Returns
    -------
    profile : TodProfile
        Factors and diagnostics. Slots that were truncated away on every day
        are flagged in ``undefined_slots`` and carry NaN.

    Raises
    ------
    DegenerateInputError
        If the realized variance of the sample is zero.
    """
    den_tod = realized_variance(grid)
    if den_tod == 0:
        raise DegenerateInputError(
            "realized variance is zero; TOD factors are undefined"
        )

    alpha = bar_alpha(grid)
    mask = raw_truncation_mask(grid, alpha, exponent)
    truncated_sq = np.square(np.where(mask, grid.returns, 0.0))

    num_noi = int(np.sum(mask))
    den_noi = mask.reshape(grid.n_days, grid.m).sum(axis=0)
    numer_tod = truncated_sq.reshape(grid.n_days, grid.m).sum(axis=0)

    undefined = den_noi == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        tod = np.where(
            undefined, np.nan, (num_noi / den_noi) * numer_tod / den_tod
        )

    if np.any(undefined):
        logger.info(
            "TOD undefined at slots %s",
            (np.flatnonzero(undefined) + 1).tolist(),
        )

    logger.debug(
        "bar_alpha=%.6g num_noi=%d den_tod=%.6g", alpha, num_noi, den_tod
    )

    return TodProfile(
        tod=tod,
        bar_alpha=alpha,
        den_noi=den_noi,
        num_noi=num_noi,
        den_tod=den_tod,
        numer_tod=numer_tod,
        undefined_slots=undefined,
        exponent=exponent,
    )


def cap_tod(profile: TodProfile, cap: float = DEFAULT_TOD_CAP) -> TodProfile:
    """
    Replaces every factor by ``min(cap, TOD(i))``.

    Undefined slots receive the cap itself and stay flagged in
    ``undefined_slots``; a :class:`JumpDetectionWarning` is issued for them.
    """
    if not cap > 0:
        raise DomainError(f"cap must be positive, got {cap}")

    undefined = profile.undefined_slots
    if np.any(undefined):
        warnings.warn(
            f"TOD undefined at slots "
            f"{(np.flatnonzero(undefined) + 1).tolist()}; using cap {cap}",
            JumpDetectionWarning,
            stacklevel=2,
        )

    capped = np.where(undefined, cap, np.minimum(cap, profile.tod))

    return replace(profile, tod=capped, cap=cap)


def expand_tod(profile: TodProfile, grid: ReturnGrid) -> np.ndarray:
    """Repeats the per-slot factors over every day of the grid."""
    if profile.m != grid.m:
        raise StructuralError(
            f"profile has {profile.m} slots, grid has m={grid.m}"
        )
    if not profile.is_defined:
        raise DomainError(
            "profile has undefined slots; apply cap_tod before expanding"
        )

    return np.tile(profile.tod, grid.n_days)
