from todjumps.simulator.config import (
    DiurnalParams,
    HawkesParams,
    JumpSizeParams,
    SimConfig,
    VarianceParams,
    diurnal_factor,
    slot_fractions,
)
from todjumps.simulator.evaluation import (
    DetectionSummary,
    evaluate_detection,
    evaluate_indices,
    match_jumps,
)
from todjumps.simulator.hawkes import hawkes_intensity, simulate_hawkes
from todjumps.simulator.path import (
    SimPath,
    inject_jumps,
    simulate_batch,
    simulate_path,
)

__all__ = [
    "DetectionSummary",
    "DiurnalParams",
    "HawkesParams",
    "JumpSizeParams",
    "SimConfig",
    "SimPath",
    "VarianceParams",
    "diurnal_factor",
    "evaluate_detection",
    "evaluate_indices",
    "hawkes_intensity",
    "inject_jumps",
    "match_jumps",
    "simulate_batch",
    "simulate_hawkes",
    "simulate_path",
    "slot_fractions",
]
