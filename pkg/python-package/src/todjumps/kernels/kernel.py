from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np


class DeltaSequence(ABC):
    """
    Abstract class representing a delta sequence ``f_n(x) = K(x / h) / h``
    generated by a kernel ``K`` and a bandwidth ``h``, used to weight
    truncated squared returns when estimating local volatility.

    Implementations are parameterized by ``fn0 = K(0) / h`` rather than by
    ``h`` directly, so that ``f_n(x) = fn0 * K(x * fn0)`` for kernels with
    ``K(0) = 1``.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Short identifier used in reports."""
        raise NotImplementedError

    @abstractmethod
    def weights(self, offsets: np.ndarray, fn0: float) -> np.ndarray:
        """
        Evaluates the delta sequence at the given time offsets.

        Parameters
        ----------
        offsets : numpy.ndarray of float
            Offsets ``t_l - t_anchor`` in financial years, where ``t_anchor``
            is the time the estimate refers to.

        fn0 : float
            Value of the sequence at zero, ``K(0) / h``. Must be positive.

        Returns
        -------
        weights : numpy.ndarray of float
            Non-negative weights with the shape of ``offsets``.
        """
        raise NotImplementedError

    def support(self, fn0: float) -> Optional[Tuple[float, float]]:
        """
        Closed interval, in years, outside of which all weights vanish, or
        None if the sequence is not compactly supported.
        """
        return None

    def bandwidth(self, fn0: float) -> float:
        """Window length ``h`` in years implied by ``fn0``."""
        return 1.0 / fn0
