from todjumps.detector import (
    DetectorConfig,
    JumpReport,
    RoundRecord,
    detect_jumps,
    jump_sizes,
    modulus_of_continuity,
)
from todjumps.exceptions import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    InputDataError,
    JumpDetectionError,
    JumpDetectionWarning,
    StructuralError,
)
from todjumps.grid import (
    ReturnGrid,
    load_prices,
    load_returns,
    prices_to_log_returns,
)
from todjumps.spotvol import SpotVolSeries, daily_spot_variance
from todjumps.tod import TodProfile, bar_alpha, cap_tod, tod_profile

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DegenerateInputError",
    "DetectorConfig",
    "DomainError",
    "InputDataError",
    "JumpDetectionError",
    "JumpDetectionWarning",
    "JumpReport",
    "ReturnGrid",
    "RoundRecord",
    "SpotVolSeries",
    "StructuralError",
    "TodProfile",
    "bar_alpha",
    "cap_tod",
    "daily_spot_variance",
    "detect_jumps",
    "jump_sizes",
    "load_prices",
    "load_returns",
    "modulus_of_continuity",
    "prices_to_log_returns",
    "tod_profile",
]
