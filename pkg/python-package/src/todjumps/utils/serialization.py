"""
File formats of the command-line tools.

Every writer produces byte-identical output for identical inputs: JSON keys
are sorted, floats are written with 17 significant digits and lines end in
``\\n``. Indices, days and slots in files are 1-based.
"""

import json
from os import PathLike
from pathlib import Path
from typing import Any, List, Tuple, Union

import numpy as np
import pandas as pd
from todjumps.detector import JumpReport
from todjumps.exceptions import InputDataError
from todjumps.grid import ReturnGrid, parser_error
from todjumps.simulator.path import SimPath
from todjumps.spotvol import SpotVolSeries
from todjumps.tod import TodProfile

PathType = Union[str, "PathLike[str]"]

FLOAT_FORMAT = "%.17g"

JUMP_COLUMNS = [
    "index",
    "time_years",
    "day",
    "slot",
    "return",
    "threshold_at_detection",
    "size_deterministic",
]
TRUTH_COLUMNS = ["index", "time_years", "size"]


def write_json(path: PathType, data: Any) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )
    return path


def read_json(path: PathType) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputDataError(e.msg, path=str(path), line=e.lineno) from e


def write_csv(
    path: PathType, frame: pd.DataFrame, header: bool = True
) -> Path:
    path = Path(path)
    frame.to_csv(
        path,
        index=False,
        header=header,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return path


def write_returns(path: PathType, grid: ReturnGrid) -> Path:
    """One return per line in day-major order, readable by load_returns."""
    return write_csv(path, pd.DataFrame({"r": grid.returns}), header=False)


def write_tod(
    out_dir: PathType,
    profile: TodProfile,
    formats: Tuple[str, ...] = ("json", "csv"),
    stem: str = "tod",
) -> List[Path]:
    """
    Writes ``<stem>.json`` and/or ``<stem>.csv`` (``slot,tod,den_noi``)
    together with the plot-ready ``<stem>_plot.csv`` (``slot,tod``).
    """
    out_dir = Path(out_dir)
    slots = np.arange(1, profile.m + 1)

    table = pd.DataFrame(
        {"slot": slots, "tod": profile.tod, "den_noi": profile.den_noi}
    )

    written = []
    if "json" in formats:
        written.append(write_json(out_dir / f"{stem}.json", profile.to_dict()))
    if "csv" in formats:
        written.append(write_csv(out_dir / f"{stem}.csv", table))
    written.append(
        write_csv(out_dir / f"{stem}_plot.csv", table[["slot", "tod"]])
    )

    return written


def write_spotvol(
    out_dir: PathType, series: SpotVolSeries, stem: str = "sigma_sq"
) -> List[Path]:
    """Writes ``<stem>.csv`` (``day,sigma_sq_annualized``) and JSON."""
    out_dir = Path(out_dir)
    table = pd.DataFrame(
        {
            "day": np.arange(1, series.n_days + 1),
            "sigma_sq_annualized": series.sigmaq_daily,
        }
    )

    return [
        write_csv(out_dir / f"{stem}.csv", table),
        write_json(out_dir / f"{stem}.json", series.to_dict()),
    ]


def jump_table(report: JumpReport) -> pd.DataFrame:
    indices = report.jump_indices
    m = max(report.m, 1)

    return pd.DataFrame(
        {
            "index": indices + 1,
            "time_years": report.jump_times,
            "day": indices // m + 1,
            "slot": indices % m + 1,
            "return": report.jump_returns,
            "threshold_at_detection": report.threshold_at_detection,
            "size_deterministic": report.sizes_deterministic,
        },
        columns=JUMP_COLUMNS,
    )


def write_jump_report(
    out_dir: PathType,
    report: JumpReport,
    grid: ReturnGrid,
    formats: Tuple[str, ...] = ("json", "csv"),
    stem: str = "jumps",
) -> List[Path]:
    """
    Writes the report as ``<stem>.json`` and/or ``<stem>.csv`` together with
    ``returns_plot.csv`` (``time_years,return,flagged``): every return with a
    0/1 flag marking the slots that contain a detected jump.
    """
    out_dir = Path(out_dir)
    written = []

    if "json" in formats:
        written.append(write_json(out_dir / f"{stem}.json", report.to_dict()))
    if "csv" in formats:
        written.append(write_csv(out_dir / f"{stem}.csv", jump_table(report)))

    flagged = np.zeros(grid.n, dtype=np.int64)
    flagged[report.jump_indices] = 1
    plot = pd.DataFrame(
        {"time_years": grid.times, "return": grid.returns, "flagged": flagged}
    )
    written.append(write_csv(out_dir / "returns_plot.csv", plot))

    return written


def read_jump_indices(path: PathType) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reads a jump CSV written by :func:`write_jump_report` and returns the
    0-based indices and the deterministic size estimates.
    """
    frame = _read_table(path, ["index", "size_deterministic"])
    return (
        frame["index"].to_numpy(dtype=np.int64) - 1,
        frame["size_deterministic"].to_numpy(dtype=np.float64),
    )


def truth_table(path: SimPath) -> pd.DataFrame:
    indices = path.true_jump_indices
    return pd.DataFrame(
        {
            "index": indices + 1,
            "time_years": path.grid.delta * (indices + 1),
            "size": path.true_jump_sizes,
        },
        columns=TRUTH_COLUMNS,
    )


def write_sim_path(out_dir: PathType, path: SimPath) -> List[Path]:
    """
    Writes ``returns.txt`` (grid format), ``truth.csv``
    (``index,time_years,size``) and ``sim_config.json``.
    """
    out_dir = Path(out_dir)
    return [
        write_returns(out_dir / "returns.txt", path.grid),
        write_csv(out_dir / "truth.csv", truth_table(path)),
        write_json(out_dir / "sim_config.json", path.config.to_dict()),
    ]


def read_truth(path: PathType) -> Tuple[np.ndarray, np.ndarray]:
    """0-based true jump indices and sizes from a ``truth.csv`` file."""
    frame = _read_table(path, ["index", "size"])
    return (
        frame["index"].to_numpy(dtype=np.int64) - 1,
        frame["size"].to_numpy(dtype=np.float64),
    )


def _read_table(path: PathType, columns: List[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path, float_precision="round_trip", encoding="utf-8"
        )
    except pd.errors.EmptyDataError as e:
        raise InputDataError("file is empty", path=str(path)) from e
    except pd.errors.ParserError as e:
        raise parser_error(e, path) from e

    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise InputDataError(f"missing columns {missing}", path=str(path))

    return frame

