from todjumps.kernels.indicator import IndicatorDeltaSequence
from todjumps.kernels.kernel import DeltaSequence

__all__ = [
    "DeltaSequence",
    "IndicatorDeltaSequence",
]
