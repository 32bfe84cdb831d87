import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from todjumps.detector import JumpReport
from todjumps.exceptions import DomainError, StructuralError
from todjumps.simulator.path import SimPath

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DetectionSummary:
    """
    Confusion counts of detected against true jump slots.

    ``precision`` is None when nothing was detected and ``recall`` is None
    when the truth holds no jumps. Size errors compare the detected
    deterministic size estimate with the true summed jump size of each
    matched pair; they are None without matches.
    """

    true_positives: int
    false_positives: int
    false_negatives: int
    precision: Optional[float]
    recall: Optional[float]
    matches: List[Tuple[int, int]]
    tolerance_slots: int
    size_error_mean: Optional[float] = None
    size_error_mae: Optional[float] = None
    size_error_rmse: Optional[float] = None

    @property
    def precision_defined(self) -> bool:
        return self.precision is not None

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form; matched indices are 1-based."""
        return {
            "tolerance_slots": self.tolerance_slots,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "precision": self.precision,
            "precision_defined": self.precision_defined,
            "recall": self.recall,
            "size_error_mean": self.size_error_mean,
            "size_error_mae": self.size_error_mae,
            "size_error_rmse": self.size_error_rmse,
            "matches": [
                {"true_index": t + 1, "detected_index": d + 1}
                for t, d in self.matches
            ],
        }


def match_jumps(
    true_indices: np.ndarray,
    detected_indices: np.ndarray,
    tolerance_slots: int = 0,
) -> List[Tuple[int, int]]:
    """
    Pairs detected with true jump slots lying at most ``tolerance_slots``
    apart. Candidate pairs are taken greedily by increasing distance, then
    by true and detected index; every slot is used at most once.
    """
    if tolerance_slots < 0:
        raise DomainError(
            f"tolerance_slots must be >= 0, got {tolerance_slots}"
        )

    truth = np.unique(np.asarray(true_indices, dtype=np.int64))
    detected = np.unique(np.asarray(detected_indices, dtype=np.int64))

    candidates = []
    for d in detected.tolist():
        lo = np.searchsorted(truth, d - tolerance_slots, side="left")
        hi = np.searchsorted(truth, d + tolerance_slots, side="right")
        for t in truth[lo:hi].tolist():
            candidates.append((abs(t - d), t, d))

    used_true = set()
    used_detected = set()
    matches = []
    for _, t, d in sorted(candidates):
        if t in used_true or d in used_detected:
            continue
        used_true.add(t)
        used_detected.add(d)
        matches.append((t, d))

    return sorted(matches)


def evaluate_indices(
    true_indices: np.ndarray,
    true_sizes: np.ndarray,
    detected_indices: np.ndarray,
    detected_sizes: Optional[np.ndarray] = None,
    tolerance_slots: int = 0,
) -> DetectionSummary:
    """
    Scores detected jump slots against the truth; see
    :func:`evaluate_detection`. Indices are 0-based flat indices and must be
    unique within each side.
    """
    true_indices = np.asarray(true_indices, dtype=np.int64)
    detected_indices = np.asarray(detected_indices, dtype=np.int64)
    true_sizes = np.asarray(true_sizes, dtype=np.float64)

    if true_sizes.shape != true_indices.shape:
        raise StructuralError(
            f"{true_indices.size} true indices but {true_sizes.size} sizes"
        )

    matches = match_jumps(true_indices, detected_indices, tolerance_slots)

    tp = len(matches)
    fp = int(np.unique(detected_indices).size) - tp
    fn = int(np.unique(true_indices).size) - tp

    precision = tp / (tp + fp) if tp + fp > 0 else None
    recall = tp / (tp + fn) if tp + fn > 0 else None

    errors = None
    if detected_sizes is not None and matches:
        detected_sizes = np.asarray(detected_sizes, dtype=np.float64)
        if detected_sizes.shape != detected_indices.shape:
            raise StructuralError(
                f"{detected_indices.size} detected indices but "
                f"{detected_sizes.size} sizes"
            )

        true_by_index = dict(zip(true_indices.tolist(), true_sizes.tolist()))
        detected_by_index = dict(
            zip(detected_indices.tolist(), detected_sizes.tolist())
        )
        errors = np.array(
            [detected_by_index[d] - true_by_index[t] for t, d in matches]
        )

    return DetectionSummary(
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        precision=precision,
        recall=recall,
        matches=matches,
        tolerance_slots=tolerance_slots,
        size_error_mean=None if errors is None else float(np.mean(errors)),
        size_error_mae=(
            None if errors is None else float(np.mean(np.abs(errors)))
        ),
        size_error_rmse=(
            None if errors is None else float(np.sqrt(np.mean(errors**2)))
        ),
    )


def evaluate_detection(
    path: SimPath, report: JumpReport, tolerance_slots: int = 0
) -> DetectionSummary:
    """
    Compares a detection report with the ground truth of a simulated path.

    Parameters
    ----------
    path : SimPath
        Simulated path holding the true jump slots and sizes.

    report : JumpReport
        Detection result on ``path.grid``.

    tolerance_slots : int
        Largest distance, in slots, at which a detection still matches a
        true jump.

    Returns
    -------
    summary : DetectionSummary
        True and false positives, false negatives, precision, recall and
        size errors of the matched pairs.
    """
    grid = path.grid
    if (report.m, report.n_days) != (grid.m, grid.n_days):
        raise StructuralError(
            f"report covers m={report.m}, n_days={report.n_days}; path "
            f"covers m={grid.m}, n_days={grid.n_days}"
        )

    summary = evaluate_indices(
        path.true_jump_indices,
        path.true_jump_sizes,
        report.jump_indices,
        report.sizes_deterministic,
        tolerance_slots,
    )

    logger.info(
        "tp=%d fp=%d fn=%d precision=%s recall=%s",
        summary.true_positives,
        summary.false_positives,
        summary.false_negatives,
        summary.precision,
        summary.recall,
    )

    return summary
