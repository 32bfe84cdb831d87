from typing import Optional, Tuple

import numpy as np
from todjumps.exceptions import DomainError
from todjumps.kernels.kernel import DeltaSequence

# Offsets measured on the observation grid reach the window edges only up to
# floating-point rounding; scaled offsets this close to 0 or 1 are snapped.
_EDGE_TOLERANCE = 1e-9


class IndicatorDeltaSequence(DeltaSequence):
    """
    Delta sequence generated by the forward-looking indicator kernel
    ``K(x) = 1{0 <= x < 1}``: weight ``fn0`` on ``[0, 1 / fn0)`` and zero
    elsewhere. With ``fn0 = 1 / (m * delta)`` the window covers exactly the
    ``m`` slots starting at the anchor.
    """

    @property
    def name(self) -> str:
        return "indicator"

    def weights(self, offsets: np.ndarray, fn0: float) -> np.ndarray:
        if not fn0 > 0:
            raise DomainError(f"fn0 must be positive, got {fn0}")

        scaled = np.asarray(offsets, dtype=np.float64) * fn0
        scaled = np.where(
            np.abs(scaled) <= _EDGE_TOLERANCE, 0.0, scaled
        )
        scaled = np.where(
            np.abs(scaled - 1.0) <= _EDGE_TOLERANCE, 1.0, scaled
        )

        inside = (scaled >= 0) & (scaled < 1)
        return fn0 * inside.astype(np.float64)

    def support(self, fn0: float) -> Optional[Tuple[float, float]]:
        return 0.0, 1.0 / fn0
