import logging
import math
from typing import List, Sequence, Union

import numpy as np
from todjumps.simulator.config import validate_hawkes

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def hawkes_intensity(
    t: float, events: Sequence[float], mu: float, alpha: float, beta: float
) -> float:
    """
    Conditional intensity ``mu + sum_{t_k < t} alpha * exp(-beta (t - t_k))``.
    """
    past = np.asarray(events, dtype=np.float64)
    past = past[past < t]
    return mu + float(np.sum(alpha * np.exp(-beta * (t - past))))


def simulate_hawkes(
    mu: float, alpha: float, beta: float, horizon: float, seed: SeedLike
) -> np.ndarray:
    """
    Samples a Hawkes process with exponential kernel on ``[0, horizon]`` by
    Ogata's thinning.

    Between events the intensity only decays, so its value right after the
    current candidate time bounds it until the next event and serves as the
    thinning envelope. The excitation is carried recursively, which keeps
    each step independent of the number of past events.

    Parameters
    ----------
    mu : float
        Baseline intensity, events per year.

    alpha : float
        Jump of the intensity at each event.

    beta : float
        Decay rate of the excitation; ``alpha < beta`` is required.

    horizon : float
        Length of the observation window, in years.

    seed : int, SeedSequence or Generator
        Source of randomness. The same seed always yields the same events.

    Returns
    -------
    events : numpy.ndarray of float
        Strictly increasing event times in ``(0, horizon]``.
    """
    validate_hawkes(mu, alpha, beta)

    rng = np.random.default_rng(seed)

    events: List[float] = []
    now = 0.0
    excitation = 0.0

    while True:
        envelope = mu + excitation
        if envelope <= 0:
            break

        wait = rng.exponential(1.0 / envelope)
        excitation *= math.exp(-beta * wait)
        now += wait
        if now > horizon:
            break

        if rng.uniform() * envelope <= mu + excitation:
            events.append(now)
            excitation += alpha

    logger.debug(
        "Sampled %d Hawkes events over %g years", len(events), horizon
    )

    return np.asarray(events, dtype=np.float64)
