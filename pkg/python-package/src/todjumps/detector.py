"""
Recursive threshold jump detection with a TOD-corrected threshold.

A return ``r_j`` is flagged when its absolute value exceeds

    round_multiplier * TOD(slot(j)) * sigma(day(j)) * mc

where ``mc = sqrt(2 * delta * log(1 / delta))`` bounds the Brownian
increments over one slot. The daily volatility is first estimated from
returns truncated with a raw, constant threshold; each round then
re-estimates it from the returns kept by the previous round's thresholds,
until a round flags nothing new.
"""

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
from todjumps.exceptions import (
    ConfigurationError,
    DomainError,
    JumpDetectionWarning,
    StructuralError,
)
from todjumps.grid import ReturnGrid
from todjumps.spotvol import (
    SpotVolSeries,
    daily_spot_variance,
    expand_daily,
    truncated_squares,
)
from todjumps.tod import (
    DEFAULT_TOD_CAP,
    DEFAULT_TRUNCATION_EXPONENT,
    TodProfile,
    cap_tod,
    expand_tod,
    realized_variance,
    tod_profile,
)

logger = logging.getLogger(__name__)

SIZE_MODE_DETERMINISTIC = "deterministic"
SIZE_MODE_RANDOMIZED = "randomized"
SIZE_MODES = (SIZE_MODE_DETERMINISTIC, SIZE_MODE_RANDOMIZED)


@dataclass(frozen=True)
class DetectorConfig:
    """
    Constants of the detection procedure.

    Parameters
    ----------
    raw_multiplier : float
        Coefficient of the initial raw threshold
        ``raw_multiplier * bar_alpha * mc``.

    round_multiplier : float
        Coefficient of the per-round thresholds.

    tod_cap : float
        Upper bound applied to every TOD factor.

    max_rounds : int
        Maximum number of detection rounds.

    truncation_exponent : float
        Exponent of the raw truncation used to estimate the TOD profile.
    """

    raw_multiplier: float = 6.0
    round_multiplier: float = 2.0
    tod_cap: float = DEFAULT_TOD_CAP
    max_rounds: int = 20
    truncation_exponent: float = DEFAULT_TRUNCATION_EXPONENT

    def __post_init__(self) -> None:
        for name in ("raw_multiplier", "round_multiplier", "tod_cap"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(
                    name, f"must be a positive number, got {value}"
                )

        if int(self.max_rounds) != self.max_rounds or self.max_rounds < 1:
            raise ConfigurationError(
                "max_rounds", f"must be an integer >= 1, got {self.max_rounds}"
            )

        if not math.isfinite(self.truncation_exponent):
            raise ConfigurationError(
                "truncation_exponent",
                f"must be finite, got {self.truncation_exponent}",
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "DetectorConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigurationError(
                sorted(unknown)[0], "unknown detector setting"
            )

        return cls(**values)


@dataclass(frozen=True, eq=False)
class RoundRecord:
    """
    Outcome of one detection round.

    ``new_indices`` are the 0-based flat indices first flagged in this
    round, ``thresholds`` the per-observation thresholds it compared
    against and ``sigmaq`` the daily variance series they were built from.
    """

    number: int
    new_indices: np.ndarray
    thresholds: np.ndarray
    sigmaq: SpotVolSeries

    @property
    def count(self) -> int:
        return int(self.new_indices.size)


@dataclass(frozen=True, eq=False)
class JumpReport:
    """
    Detected jumps, per-round diagnostics and jump-size estimates.

    Indices are 0-based flat indices into the grid; ``jump_times`` are the
    right ends ``delta * (index + 1)`` of the slots containing the jumps.
    """

    jump_indices: np.ndarray
    jump_times: np.ndarray
    jump_returns: np.ndarray
    detection_round: np.ndarray
    threshold_at_detection: np.ndarray
    rounds: List[RoundRecord]
    sizes_deterministic: np.ndarray
    sizes_randomized: Optional[np.ndarray]
    modulus_mc: float
    bar_alpha: float
    raw_threshold: float
    initial_sigmaq: Optional[SpotVolSeries]
    size_sigmaq: np.ndarray
    tod: Optional[TodProfile]
    config: DetectorConfig
    converged: bool
    degenerate: bool = False
    seed: Optional[int] = None
    m: int = 0
    n_days: int = 0
    delta: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return int(self.jump_indices.size)

    @property
    def round_counts(self) -> List[int]:
        """New detections of every round, in order."""
        return [record.count for record in self.rounds]

    def analysis(self) -> Dict[str, Optional[float]]:
        """
        Mean and sample standard deviation of the returns containing jumps
        and of both jump-size estimates.
        """
        summary: Dict[str, Optional[float]] = {"count": float(self.total)}

        columns = {
            "return": self.jump_returns,
            "size_deterministic": self.sizes_deterministic,
            "size_randomized": self.sizes_randomized,
        }
        for name, values in columns.items():
            if values is None or values.size == 0:
                summary[f"mean_{name}"] = None
                summary[f"sd_{name}"] = None
                continue

            summary[f"mean_{name}"] = float(np.mean(values))
            summary[f"sd_{name}"] = (
                float(np.std(values, ddof=1)) if values.size > 1 else None
            )

        return summary

    def to_dict(self, include_thresholds: bool = True) -> Dict[str, Any]:
        """
        Full JSON-ready structure; indices, days and slots are 1-based.
        Per-round threshold sequences hold n values each and can be left
        out with ``include_thresholds=False``.
        """
        m = max(self.m, 1)

        return {
            "converged": self.converged,
            "degenerate": self.degenerate,
            "total": self.total,
            "round_counts": self.round_counts,
            "modulus_mc": self.modulus_mc,
            "bar_alpha": self.bar_alpha,
            "raw_threshold": self.raw_threshold,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "tod": None if self.tod is None else self.tod.to_dict(),
            "initial_sigma_sq": (
                None
                if self.initial_sigmaq is None
                else self.initial_sigmaq.sigmaq_daily.tolist()
            ),
            "rounds": [
                {
                    "round": record.number,
                    "new_detections": record.count,
                    "new_indices": (record.new_indices + 1).tolist(),
                    "sigma_sq": record.sigmaq.sigmaq_daily.tolist(),
                    "thresholds": (
                        record.thresholds.tolist()
                        if include_thresholds
                        else None
                    ),
                }
                for record in self.rounds
            ],
            "jumps": [
                {
                    "index": int(index) + 1,
                    "time_years": float(self.jump_times[k]),
                    "day": int(index) // m + 1,
                    "slot": int(index) % m + 1,
                    "return": float(self.jump_returns[k]),
                    "round": int(self.detection_round[k]),
                    "threshold_at_detection": float(
                        self.threshold_at_detection[k]
                    ),
                    "size_deterministic": float(self.sizes_deterministic[k]),
                    "size_randomized": (
                        None
                        if self.sizes_randomized is None
                        else float(self.sizes_randomized[k])
                    ),
                }
                for k, index in enumerate(self.jump_indices)
            ],
            "analysis": self.analysis(),
            "notes": list(self.notes),
        }


def modulus_of_continuity(delta: float) -> float:
    """
    Brownian modulus of continuity ``sqrt(2 * delta * log(1 / delta))`` for
    increments over ``delta`` years (natural logarithm).

    Raises
    ------
    DomainError
        Unless ``0 < delta < 1``.
    """
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")

    return math.sqrt(2.0 * delta * math.log(1.0 / delta))


def initial_raw_threshold(
    bar_alpha: float, delta: float, raw_multiplier: float = 6.0
) -> float:
    """Constant threshold ``raw_multiplier * bar_alpha * mc``."""
    if bar_alpha < 0:
        raise DomainError(f"bar_alpha must be non-negative, got {bar_alpha}")

    return raw_multiplier * bar_alpha * modulus_of_continuity(delta)


def round_thresholds(
    tod_glob: np.ndarray,
    sigmaq_glob: np.ndarray,
    delta: float,
    round_multiplier: float = 2.0,
) -> np.ndarray:
    """
    Per-observation thresholds
    ``round_multiplier * TOD_j * sqrt(sigma2_j) * mc``.

    Parameters
    ----------
    tod_glob : numpy.ndarray of float
        TOD factor of every observation, see :func:`todjumps.tod.expand_tod`.

    sigmaq_glob : numpy.ndarray of float
        Non-negative daily variance of every observation, see
        :func:`todjumps.spotvol.expand_daily`.

    delta : float
        Slot length in years.

    round_multiplier : float
        Overall coefficient.

    Returns
    -------
    thresholds : numpy.ndarray of float
        One threshold per observation.
    """
    tod_glob = np.asarray(tod_glob, dtype=np.float64)
    sigmaq_glob = np.asarray(sigmaq_glob, dtype=np.float64)

    if tod_glob.shape != sigmaq_glob.shape:
        raise StructuralError(
            f"TOD sequence has {tod_glob.size} entries, "
            f"variance sequence has {sigmaq_glob.size}"
        )
    if np.any(sigmaq_glob < 0):
        raise DomainError("daily variances must be non-negative")

    mc = modulus_of_continuity(delta)
    return round_multiplier * tod_glob * np.sqrt(sigmaq_glob) * mc


def jump_sizes(
    grid: ReturnGrid,
    sigmaq_glob: np.ndarray,
    jump_indices: np.ndarray,
    mode: str = SIZE_MODE_DETERMINISTIC,
    seed: Optional[int] = None,
) -> np.ndarray:
    """
    Estimates jump sizes by removing the Brownian contribution from the
    returns that contain jumps.

    Parameters
    ----------
    grid : ReturnGrid
        Returns the jumps were detected in.

    sigmaq_glob : numpy.ndarray of float
        Daily variance of every observation.

    jump_indices : numpy.ndarray of int
        0-based flat indices of the returns containing jumps.

    mode : {"deterministic", "randomized"}
        ``"deterministic"`` subtracts ``sigma * sqrt(delta)``;
        ``"randomized"`` subtracts ``sigma * Z * sqrt(delta)`` with ``Z``
        standard normal draws.

    seed : int, optional
        Seed of the normal draws. Required in randomized mode.

    Returns
    -------
    sizes : numpy.ndarray of float
        One estimate per jump index.
    """
    if mode not in SIZE_MODES:
        raise ConfigurationError(
            "mode", f"must be one of {SIZE_MODES}, got {mode!r}"
        )

    sigmaq_glob = np.asarray(sigmaq_glob, dtype=np.float64)
    if sigmaq_glob.size != grid.n:
        raise StructuralError(
            f"expected {grid.n} variances, got {sigmaq_glob.size}"
        )
    if np.any(sigmaq_glob < 0):
        raise DomainError("daily variances must be non-negative")

    indices = np.asarray(jump_indices, dtype=np.int64)
    if indices.size > 0 and (indices.min() < 0 or indices.max() >= grid.n):
        raise StructuralError(
            f"jump indices must lie in [0, {grid.n}), got "
            f"[{indices.min()}, {indices.max()}]"
        )

    sigma = np.sqrt(sigmaq_glob[indices])
    returns = grid.returns[indices]

    if mode == SIZE_MODE_DETERMINISTIC:
        return returns - sigma * math.sqrt(grid.delta)

    if seed is None:
        raise ConfigurationError(
            "seed", "randomized jump sizes require an explicit seed"
        )

    z = np.random.default_rng(seed).standard_normal(indices.size)
    return returns - sigma * z * math.sqrt(grid.delta)


def detect_jumps(
    grid: ReturnGrid,
    config: Optional[DetectorConfig] = None,
    seed: Optional[int] = None,
) -> JumpReport:
    """
    Runs the recursive threshold procedure on a return panel.

    Round 0 truncates the returns with the raw threshold and estimates the
    daily variances. Round ``k >= 1`` builds thresholds from the latest
    variances and flags the returns above them that no earlier round
    flagged; round 1 tests the raw returns, later rounds test the returns
    kept by the previous round's thresholds. The variances are then
    re-estimated from the returns kept by this round's thresholds. The loop
    stops after a round without new detections or after
    ``config.max_rounds`` rounds.

    Parameters
    ----------
    grid : ReturnGrid
        Returns to analyse.

    config : DetectorConfig, optional
        Procedure constants. Defaults to ``DetectorConfig()``.

    seed : int, optional
        Seed for the randomized jump sizes. If None, randomized sizes are not
        computed.

    Returns
    -------
    report : JumpReport
        Detected jumps with per-round diagnostics. Jump sizes use the
        variance series behind the final round's thresholds.
    """
    if config is None:
        config = DetectorConfig()

    mc = modulus_of_continuity(grid.delta)

    if realized_variance(grid) == 0:
        message = "all returns are zero; no jumps can be detected"
        warnings.warn(message, JumpDetectionWarning, stacklevel=2)
        return _empty_report(grid, config, mc, seed, message)

    profile = cap_tod(
        tod_profile(grid, config.truncation_exponent), config.tod_cap
    )
    tod_glob = expand_tod(profile, grid)

    raw_threshold = initial_raw_threshold(
        profile.bar_alpha, grid.delta, config.raw_multiplier
    )
    returns = grid.returns

    sigmaq = daily_spot_variance(
        grid, truncated_squares(returns, raw_threshold)
    )
    initial_sigmaq = sigmaq

    detected = np.zeros(grid.n, dtype=bool)
    detection_round = np.zeros(grid.n, dtype=np.int64)
    threshold_at_detection = np.zeros(grid.n, dtype=np.float64)

    candidates = returns
    rounds: List[RoundRecord] = []
    converged = False

    for number in range(1, config.max_rounds + 1):
        thresholds = round_thresholds(
            tod_glob,
            expand_daily(sigmaq, grid),
            grid.delta,
            config.round_multiplier,
        )

        new = (np.abs(candidates) > thresholds) & ~detected
        detected |= new
        detection_round[new] = number
        threshold_at_detection[new] = thresholds[new]

        record = RoundRecord(number, np.flatnonzero(new), thresholds, sigmaq)
        rounds.append(record)

        logger.debug("Round %d: %d new jumps", number, record.count)

        if record.count == 0:
            converged = True
            break

        candidates = np.where(np.abs(returns) <= thresholds, returns, 0.0)
        sigmaq = daily_spot_variance(
            grid, truncated_squares(returns, thresholds)
        )

    notes: List[str] = []
    if not converged:
        message = (
            f"detection did not converge within {config.max_rounds} rounds"
        )
        warnings.warn(message, JumpDetectionWarning, stacklevel=2)
        notes.append(message)

    if np.any(profile.undefined_slots):
        notes.append(
            "TOD undefined at slots "
            f"{(np.flatnonzero(profile.undefined_slots) + 1).tolist()}; "
            f"cap {config.tod_cap} used"
        )

    size_sigmaq = expand_daily(rounds[-1].sigmaq, grid)
    jump_indices = np.flatnonzero(detected)

    sizes_randomized = None
    if seed is not None:
        sizes_randomized = jump_sizes(
            grid, size_sigmaq, jump_indices, SIZE_MODE_RANDOMIZED, seed
        )

    logger.info(
        "Detected %d jumps in %d rounds (%s)",
        jump_indices.size,
        len(rounds),
        ", ".join(str(record.count) for record in rounds),
    )

    return JumpReport(
        jump_indices=jump_indices,
        jump_times=grid.delta * (jump_indices + 1),
        jump_returns=returns[jump_indices],
        detection_round=detection_round[jump_indices],
        threshold_at_detection=threshold_at_detection[jump_indices],
        rounds=rounds,
        sizes_deterministic=jump_sizes(
            grid, size_sigmaq, jump_indices, SIZE_MODE_DETERMINISTIC
        ),
        sizes_randomized=sizes_randomized,
        modulus_mc=mc,
        bar_alpha=profile.bar_alpha,
        raw_threshold=raw_threshold,
        initial_sigmaq=initial_sigmaq,
        size_sigmaq=size_sigmaq,
        tod=profile,
        config=config,
        converged=converged,
        seed=seed,
        m=grid.m,
        n_days=grid.n_days,
        delta=grid.delta,
        notes=notes,
    )


def _empty_report(
    grid: ReturnGrid,
    config: DetectorConfig,
    mc: float,
    seed: Optional[int],
    message: str,
) -> JumpReport:
    no_jumps = np.zeros(0, dtype=np.int64)
    no_values = np.zeros(0, dtype=np.float64)

    return JumpReport(
        jump_indices=no_jumps,
        jump_times=no_values,
        jump_returns=no_values,
        detection_round=no_jumps,
        threshold_at_detection=no_values,
        rounds=[],
        sizes_deterministic=no_values,
        sizes_randomized=None if seed is None else no_values,
        modulus_mc=mc,
        bar_alpha=0.0,
        raw_threshold=0.0,
        initial_sigmaq=None,
        size_sigmaq=np.zeros(grid.n, dtype=np.float64),
        tod=None,
        config=config,
        converged=True,
        degenerate=True,
        seed=seed,
        m=grid.m,
        n_days=grid.n_days,
        delta=grid.delta,
        notes=[message],
    )
