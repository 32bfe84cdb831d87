"""
Parameters of the synthetic price model

    dX = b dt + tau(u) * sqrt(v) dW + dJ
    dv = kappa * (theta - v) dt + xi * sqrt(v) dB,   d<W, B> = rho dt

where ``u`` is the intraday fraction of the trading day and ``J`` jumps at the
events of a Hawkes process with Gaussian sizes. Rates and variances are per
financial year.
"""

import math
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Mapping, Optional, Type, TypeVar

import numpy as np
from todjumps.exceptions import ConfigurationError, JumpDetectionWarning
from todjumps.grid import DEFAULT_SLOTS_PER_DAY, default_delta

_T = TypeVar("_T")


@dataclass(frozen=True)
class VarianceParams:
    """
    Square-root variance process.

    Parameters
    ----------
    theta : float
        Long-run variance, per year.

    kappa : float
        Mean-reversion speed, per year.

    xi : float
        Volatility of variance.

    rho : float
        Correlation between price and variance shocks, in ``[-1, 0]``.

    v0 : float
        Initial variance.
    """

    theta: float = 0.04
    kappa: float = 5.0
    xi: float = 0.3
    rho: float = -0.5
    v0: float = 0.04

    def __post_init__(self) -> None:
        for name in ("theta", "kappa", "xi", "v0"):
            _require(self, name, getattr(self, name) >= 0, "must be >= 0")

        _require(self, "rho", -1.0 <= self.rho <= 0.0, "must lie in [-1, 0]")

        if not self.feller_satisfied:
            warnings.warn(
                f"2*kappa*theta={2 * self.kappa * self.theta:.4g} is below "
                f"xi^2={self.xi ** 2:.4g}; the variance will hit zero",
                JumpDetectionWarning,
                stacklevel=3,
            )

    @property
    def feller_satisfied(self) -> bool:
        return 2.0 * self.kappa * self.theta >= self.xi**2

    @classmethod
    def constant(cls, variance: float) -> "VarianceParams":
        """A variance frozen at ``variance``."""
        return cls(theta=variance, kappa=0.0, xi=0.0, rho=0.0, v0=variance)


@dataclass(frozen=True)
class DiurnalParams:
    """
    U-shaped intraday volatility multiplier
    ``tau(u) = C + A * exp(-a * u) + B * exp(-b * (1 - u))``.

    If ``C`` is None it is solved for so that the mean of ``tau ** 2`` over
    ``[0, 1]`` equals one.
    """

    A: float = 0.75
    a: float = 10.0
    B: float = 0.75
    b: float = 10.0
    C: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            _require(self, name, getattr(self, name) >= 0, "must be >= 0")

        if self.C is None:
            object.__setattr__(self, "C", _normalizing_level(self))

        grid = np.linspace(0.0, 1.0, 1001)
        _require(
            self,
            "C",
            bool(np.min(diurnal_factor(grid, self)) > 0),
            "tau(u) must be positive on [0, 1]",
        )

    @classmethod
    def flat(cls) -> "DiurnalParams":
        """``tau`` identically one."""
        return cls(A=0.0, a=0.0, B=0.0, b=0.0, C=1.0)

    def normalized_tod(self, m: int) -> np.ndarray:
        """
        ``tau ** 2`` at the ``m`` slot midpoints, divided by its mean: the
        profile a TOD estimator recovers from jump-free paths.
        """
        squares = diurnal_factor(slot_fractions(m), self) ** 2
        return squares / np.mean(squares)


@dataclass(frozen=True)
class HawkesParams:
    """
    Exponential-kernel Hawkes process with intensity
    ``mu + sum_k alpha * exp(-beta * (t - t_k))``, rates per year.
    """

    mu: float = 25.0
    alpha: float = 1000.0
    beta: float = 2000.0

    def __post_init__(self) -> None:
        validate_hawkes(self.mu, self.alpha, self.beta)

    @property
    def branching_ratio(self) -> float:
        return self.alpha / self.beta

    @property
    def stationary_rate(self) -> float:
        """Long-run mean number of events per year."""
        return self.mu / (1.0 - self.branching_ratio)


@dataclass(frozen=True)
class JumpSizeParams:
    """Gaussian jump sizes, in log-price units."""

    mean: float = -0.004
    sd: float = 0.02

    def __post_init__(self) -> None:
        _require(self, "sd", self.sd >= 0, "must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    """
    Complete description of a simulated path.

    Parameters
    ----------
    m : int
        Slots per day.

    n_days : int
        Number of simulated trading days.

    delta : float, optional
        Slot length in years. Defaults to ``1 / (252 * m)``.

    variance, diurnal, hawkes, jump_size
        Component parameters; see the respective classes.

    drift : float
        Constant drift ``b`` per year.

    seed : int
        Seed of the path's random streams.
    """

    m: int = DEFAULT_SLOTS_PER_DAY
    n_days: int = 252
    delta: Optional[float] = None
    variance: VarianceParams = field(default_factory=VarianceParams)
    diurnal: DiurnalParams = field(default_factory=DiurnalParams)
    hawkes: HawkesParams = field(default_factory=HawkesParams)
    jump_size: JumpSizeParams = field(default_factory=JumpSizeParams)
    drift: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        _require(self, "m", self.m >= 2, "must be >= 2")
        _require(self, "n_days", self.n_days >= 1, "must be >= 1")

        if self.delta is None:
            object.__setattr__(self, "delta", default_delta(self.m))
        _require(self, "delta", 0 < self.delta < 1, "must lie in (0, 1)")
        _require(self, "drift", math.isfinite(self.drift), "must be finite")
        _require(self, "seed", self.seed >= 0, "must be >= 0")

    @property
    def n(self) -> int:
        return self.m * self.n_days

    @property
    def horizon(self) -> float:
        """Length of the simulated trading clock, in years."""
        return self.n * float(self.delta)  # type: ignore[arg-type]

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "SimConfig":
        """
        Builds a configuration from nested dictionaries, e.g. parsed JSON.
        Missing entries take their defaults; errors name the offending field
        with a dotted path such as ``hawkes.alpha``.
        """
        nested = {
            "variance": VarianceParams,
            "diurnal": DiurnalParams,
            "hawkes": HawkesParams,
            "jump_size": JumpSizeParams,
        }

        kwargs: Dict[str, Any] = {}
        for key, value in _checked(cls, values, "").items():
            if key in nested:
                if not isinstance(value, Mapping):
                    raise ConfigurationError(key, "must be a mapping")
                kwargs[key] = _build(nested[key], value, key)
            else:
                kwargs[key] = value

        return cls(**kwargs)


def validate_hawkes(mu: float, alpha: float, beta: float) -> None:
    """Raises ConfigurationError unless mu >= 0 and 0 <= alpha < beta."""
    if not mu >= 0:
        raise ConfigurationError("mu", f"must be >= 0, got {mu}")
    if not alpha >= 0:
        raise ConfigurationError("alpha", f"must be >= 0, got {alpha}")
    if not alpha < beta:
        raise ConfigurationError(
            "alpha",
            f"must be below beta for a stationary process, "
            f"got alpha={alpha}, beta={beta}",
        )


def diurnal_factor(u: np.ndarray, params: DiurnalParams) -> np.ndarray:
    """``tau(u)`` for intraday fractions ``u`` in ``[0, 1]``."""
    u = np.asarray(u, dtype=np.float64)
    return (
        float(params.C)  # type: ignore[arg-type]
        + params.A * np.exp(-params.a * u)
        + params.B * np.exp(-params.b * (1.0 - u))
    )


def slot_fractions(m: int) -> np.ndarray:
    """Midpoints ``(i + 1/2) / m`` of the m slots of a day."""
    return (np.arange(m, dtype=np.float64) + 0.5) / m


def _normalizing_level(params: DiurnalParams) -> float:
    # mean of tau^2 = C^2 + 2 C E[g] + E[g^2] with g the exponential part
    mean_g = _exp_mean(params.a) * params.A + _exp_mean(params.b) * params.B
    mean_g2 = (
        params.A**2 * _exp_mean(2.0 * params.a)
        + params.B**2 * _exp_mean(2.0 * params.b)
        + 2.0
        * params.A
        * params.B
        * math.exp(-params.b)
        * _exp_mean(params.a - params.b)
    )

    discriminant = mean_g**2 - mean_g2 + 1.0
    if discriminant < 0:
        raise ConfigurationError(
            "C", "no level makes the mean of tau^2 equal to one"
        )

    return -mean_g + math.sqrt(discriminant)


def _exp_mean(rate: float) -> float:
    """Mean of ``exp(-rate * u)`` over ``u`` in [0, 1], for any real rate."""
    if rate == 0:
        return 1.0
    return -math.expm1(-rate) / rate


def _require(obj: object, name: str, ok: bool, message: str) -> None:
    if not ok:
        raise ConfigurationError(
            name, f"{message}, got {getattr(obj, name)!r}"
        )


def _checked(
    cls: Type[Any], values: Mapping[str, Any], prefix: str
) -> Mapping[str, Any]:
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigurationError(f"{prefix}{unknown[0]}", "unknown setting")

    return values


def _build(cls: Type[_T], values: Mapping[str, Any], section: str) -> _T:
    try:
        return cls(**_checked(cls, values, f"{section}."))
    except ConfigurationError as e:
        if e.field.startswith(f"{section}."):
            raise
        raise ConfigurationError(
            f"{section}.{e.field}", str(e).split(": ", 1)[-1]
        ) from e
