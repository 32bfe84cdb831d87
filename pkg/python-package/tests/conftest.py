import numpy as np
import pytest
from todjumps.grid import ReturnGrid
from todjumps.simulator import (
    DiurnalParams,
    HawkesParams,
    SimConfig,
    SimPath,
    VarianceParams,
    simulate_path,
)

ANNUAL_VARIANCE = 0.04


def constant_vol_config(n_days: int = 252, seed: int = 3) -> SimConfig:
    """Flat intraday pattern, constant variance and no jumps."""
    return SimConfig(
        n_days=n_days,
        variance=VarianceParams.constant(ANNUAL_VARIANCE),
        diurnal=DiurnalParams.flat(),
        hawkes=HawkesParams(mu=0.0),
        seed=seed,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def constant_vol_path() -> SimPath:
    return simulate_path(constant_vol_config())


@pytest.fixture(scope="session")
def jump_path() -> SimPath:
    return simulate_path(SimConfig(n_days=120, seed=5))


@pytest.fixture
def small_grid() -> ReturnGrid:
    return ReturnGrid(np.array([0.01, 0.02, 0.01, 0.03]), 2, 2, 1.0 / 504)


def write_lines(path, values) -> None:
    path.write_text("".join(f"{v}\n" for v in values), encoding="utf-8")
