import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np
from todjumps.exceptions import StructuralError
from todjumps.grid import ReturnGrid
from todjumps.simulator.config import SimConfig, diurnal_factor, slot_fractions
from todjumps.simulator.hawkes import simulate_hawkes

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SimPath:
    """
    A simulated return panel together with its ground truth.

    ``returns = brownian + drift * delta + jumps`` holds slot by slot, where
    ``jumps`` sums the sizes of all jumps that landed in a slot.
    ``true_jump_indices`` lists the 0-based slots holding at least one jump
    and ``true_jump_sizes`` their summed sizes; ``event_times`` and
    ``event_sizes`` keep the individual Hawkes events.
    """

    grid: ReturnGrid
    config: SimConfig
    true_spot_variance: np.ndarray
    variance: np.ndarray
    brownian: np.ndarray
    jumps: np.ndarray
    true_jump_indices: np.ndarray
    true_jump_sizes: np.ndarray
    event_times: np.ndarray
    event_sizes: np.ndarray

    @property
    def drift_increment(self) -> float:
        return self.config.drift * self.grid.delta


def simulate_path(config: SimConfig) -> SimPath:
    """
    Simulates a path on the ``delta`` grid.

    The variance follows a full-truncation Euler scheme: negative values are
    replaced by zero inside the drift and diffusion terms, and the spot
    variance of slot ``j`` is ``tau(u_j) ** 2 * max(v_j, 0)`` with ``u_j``
    the slot's intraday midpoint. The price and variance shocks of a step are
    correlated with ``rho``. Variance carries over between days. Jump times
    come from :func:`simulate_hawkes` on the trading clock and each lands in
    the slot ``(delta * j, delta * (j + 1)]`` containing it.

    Parameters
    ----------
    config : SimConfig
        Model parameters and seed.

    Returns
    -------
    path : SimPath
        The simulated returns with the quantities they were built from.
    """
    # Child streams: diffusion, jump times, jump sizes. Their order is fixed.
    diffusion_seed, hawkes_seed, size_seed = np.random.SeedSequence(
        config.seed
    ).spawn(3)

    n = config.n
    delta = float(config.delta)  # type: ignore[arg-type]
    sqrt_delta = math.sqrt(delta)

    params = config.variance
    shocks = np.random.default_rng(diffusion_seed).standard_normal((n, 2))
    rho_bar = math.sqrt(1.0 - params.rho**2)

    variance = np.empty(n, dtype=np.float64)
    v = params.v0
    for j, (z_price, z_other) in enumerate(shocks.tolist()):
        v_plus = v if v > 0 else 0.0
        variance[j] = v_plus

        z_var = params.rho * z_price + rho_bar * z_other
        v = (
            v
            + params.kappa * (params.theta - v_plus) * delta
            + params.xi * math.sqrt(v_plus) * sqrt_delta * z_var
        )

    tau = np.tile(
        diurnal_factor(slot_fractions(config.m), config.diurnal),
        config.n_days,
    )
    spot_variance = tau**2 * variance
    brownian = np.sqrt(spot_variance) * sqrt_delta * shocks[:, 0]

    hawkes = config.hawkes
    event_times = simulate_hawkes(
        hawkes.mu, hawkes.alpha, hawkes.beta, config.horizon, hawkes_seed
    )
    event_sizes = np.random.default_rng(size_seed).normal(
        config.jump_size.mean, config.jump_size.sd, event_times.size
    )

    event_slots = np.clip(
        np.ceil(event_times / delta).astype(np.int64) - 1, 0, n - 1
    )
    jumps = np.zeros(n, dtype=np.float64)
    np.add.at(jumps, event_slots, event_sizes)

    true_jump_indices = np.unique(event_slots)

    returns = brownian + config.drift * delta + jumps

    logger.debug(
        "Simulated %d returns with %d jump events in %d slots",
        n,
        event_times.size,
        true_jump_indices.size,
    )

    return SimPath(
        grid=ReturnGrid(returns, config.m, config.n_days, delta),
        config=config,
        true_spot_variance=spot_variance,
        variance=variance,
        brownian=brownian,
        jumps=jumps,
        true_jump_indices=true_jump_indices,
        true_jump_sizes=jumps[true_jump_indices],
        event_times=event_times,
        event_sizes=event_sizes,
    )


def simulate_batch(
    config: SimConfig, seeds: Iterable[int]
) -> Iterator[SimPath]:
    """Independent paths sharing ``config`` but for the seed."""
    for seed in seeds:
        yield simulate_path(config.with_seed(seed))


def inject_jumps(
    grid: ReturnGrid, indices: np.ndarray, sizes: np.ndarray
) -> Tuple[ReturnGrid, np.ndarray]:
    """
    Adds jumps of the given sizes to the returns at the given 0-based flat
    indices, returning the new grid and the sorted unique jump indices.
    """
    indices = np.asarray(indices, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.float64)

    if indices.shape != sizes.shape:
        raise StructuralError(
            f"{indices.size} jump indices but {sizes.size} sizes"
        )
    if indices.size > 0 and (indices.min() < 0 or indices.max() >= grid.n):
        raise StructuralError(f"jump indices must lie in [0, {grid.n})")

    returns = np.array(grid.returns)
    np.add.at(returns, indices, sizes)

    return grid.with_returns(returns), np.unique(indices)
