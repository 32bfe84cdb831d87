"""
Regular intraday return panels.

A panel holds ``m`` log-returns per day for ``n_days`` days, stored flat and
day-major: slot ``i`` of day ``s`` (both 0-based) lives at flat index
``s * m + i``. Overnight returns never appear in a panel.
"""

import logging
import re
from dataclasses import dataclass
from os import PathLike
from typing import Iterator, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from todjumps.exceptions import DomainError, InputDataError, StructuralError

logger = logging.getLogger(__name__)

TRADING_DAYS_PER_YEAR = 252
DEFAULT_SLOTS_PER_DAY = 77

LAYOUT_RETURNS = "returns"
LAYOUT_PRICES = "prices"
LAYOUTS = (LAYOUT_RETURNS, LAYOUT_PRICES)

PathType = Union[str, "PathLike[str]"]

_TOKENIZER_ERROR = re.compile(
    r"Expected (\d+) fields in line (\d+), saw (\d+)"
)


def default_delta(m: int) -> float:
    """Slot length in financial years for ``m`` slots per trading day."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")

    return 1.0 / (TRADING_DAYS_PER_YEAR * m)


@dataclass(frozen=True, eq=False)
class ReturnGrid:
    """
    An immutable panel of intraday log-returns.

    Parameters
    ----------
    returns : array-like of float
        ``m * n_days`` finite log-returns in day-major order. Zero returns are
        kept as they are.

    m : int
        Number of intraday slots per day, at least 2.

    n_days : int
        Number of days.

    delta : float
        Slot length in financial years.
    """

    returns: np.ndarray
    m: int
    n_days: int
    delta: float

    def __post_init__(self) -> None:
        returns = np.array(self.returns, dtype=np.float64).ravel()

        if self.m < 2:
            raise DomainError(
                f"m must be at least 2 for bipower variation, got {self.m}"
            )
        if self.n_days < 1:
            raise DomainError(f"n_days must be positive, got {self.n_days}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if returns.size != self.m * self.n_days:
            raise StructuralError(
                f"expected {self.m * self.n_days} returns "
                f"(m={self.m}, n_days={self.n_days}), got {returns.size}"
            )

        bad = np.flatnonzero(~np.isfinite(returns))
        if bad.size > 0:
            raise DomainError(
                f"non-finite return {returns[bad[0]]} at index {bad[0]}"
            )

        returns.flags.writeable = False
        object.__setattr__(self, "returns", returns)

    @classmethod
    def from_matrix(
        cls, matrix: np.ndarray, delta: Optional[float] = None
    ) -> "ReturnGrid":
        """Builds a grid from an ``(n_days, m)`` array, one row per day."""
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise StructuralError(
                f"expected a 2-D (days, slots) array, got {matrix.ndim}-D"
            )

        n_days, m = matrix.shape
        if delta is None:
            delta = default_delta(m)

        return cls(matrix.ravel(), m, n_days, delta)

    @property
    def n(self) -> int:
        """Total number of returns."""
        return self.m * self.n_days

    @property
    def times(self) -> np.ndarray:
        """Observation times ``t_j = delta * j`` for ``j = 1..n``, in years."""
        return self.delta * np.arange(1, self.n + 1, dtype=np.float64)

    def as_matrix(self) -> np.ndarray:
        """Read-only ``(n_days, m)`` view of the returns."""
        return self.returns.reshape(self.n_days, self.m)

    def day_block(self, day: int) -> np.ndarray:
        """Returns of the 0-based ``day``."""
        if not 0 <= day < self.n_days:
            raise StructuralError(
                f"day {day} out of range for {self.n_days} days"
            )

        return self.returns[day * self.m : (day + 1) * self.m]

    def days(self) -> Iterator[np.ndarray]:
        return iter(self.as_matrix())

    def day_of(self, index: Union[int, np.ndarray]) -> np.ndarray:
        """0-based day of each 0-based flat index."""
        return np.asarray(index) // self.m

    def slot_of(self, index: Union[int, np.ndarray]) -> np.ndarray:
        """0-based intraday slot of each 0-based flat index."""
        return np.asarray(index) % self.m

    def with_returns(self, returns: np.ndarray) -> "ReturnGrid":
        """A grid with the same dimensions carrying different returns."""
        return ReturnGrid(returns, self.m, self.n_days, self.delta)

    def scaled(self, factor: float) -> "ReturnGrid":
        return self.with_returns(self.returns * factor)

    def permute_days(self, order: Sequence[int]) -> "ReturnGrid":
        """Reorders whole days; ``order[k]`` is the day put at position k."""
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(self.n_days)):
            raise StructuralError(
                f"order must be a permutation of 0..{self.n_days - 1}"
            )

        return self.with_returns(self.as_matrix()[order].ravel())


def load_returns(
    path: PathType,
    m: int = DEFAULT_SLOTS_PER_DAY,
    layout: str = LAYOUT_RETURNS,
    delta: Optional[float] = None,
) -> ReturnGrid:
    """
    Reads a return panel from a UTF-8 text file.

    Parameters
    ----------
    path : str or path-like
        File to read.

    m : int
        Intraday slots per day.

    layout : {"returns", "prices"}
        ``"returns"`` expects one log-return per line in day-major order;
        ``"prices"`` expects ``day_id,price`` lines and is delegated to
        :func:`load_prices`.

    delta : float, optional
        Slot length in years. Defaults to ``1 / (252 * m)``.

    Returns
    -------
    grid : ReturnGrid
        The panel, with ``n_days`` equal to the record count divided by m.
    """
    if layout not in LAYOUTS:
        raise StructuralError(
            f"unknown layout {layout!r}, expected one of {LAYOUTS}"
        )

    if layout == LAYOUT_PRICES:
        grid = load_prices(path, delta)
        if grid.m != m:
            raise StructuralError(
                f"{path}: price blocks yield m={grid.m}, expected m={m}"
            )
        return grid

    if delta is None:
        delta = default_delta(m)

    raw = _read_text_table(path, ["value"], skip_blank_lines=False)["value"]

    values = _parse_numbers(raw, str(path)).to_numpy(dtype=np.float64)

    remainder = values.size % m
    if values.size == 0 or remainder != 0:
        raise StructuralError(
            f"{path}: {values.size} records are not divisible by m={m} "
            f"(remainder {remainder})"
        )

    logger.debug("Read %d returns from %s", values.size, path)

    return ReturnGrid(values, m, values.size // m, delta)


def load_prices(path: PathType, delta: Optional[float] = None) -> ReturnGrid:
    """
    Reads ``day_id,price`` lines and converts them to intraday log-returns.

    Day ids must be non-decreasing, compared as numbers when every id is
    numeric and as strings otherwise. Every day must carry the same number
    of prices, which is one more than the number of slots.
    """
    frame = _read_text_table(path, ["day_id", "price"])

    prices = _parse_numbers(frame["price"], str(path))
    day_ids = frame["day_id"].str.strip()

    codes, labels = pd.factorize(day_ids)
    if np.any(np.diff(codes) < 0):
        first = int(np.flatnonzero(np.diff(codes) < 0)[0]) + 1
        raise InputDataError(
            f"day id {day_ids.iloc[first]!r} appears after a later day",
            path=str(path),
            line=first + 1,
        )

    keys = pd.to_numeric(pd.Series(labels), errors="coerce")
    if keys.isna().any():
        keys = pd.Series(labels)
    if not keys.is_monotonic_increasing:
        day = int(np.flatnonzero(np.diff(keys.rank().to_numpy()) < 0)[0]) + 1
        first = int(np.flatnonzero(codes == day)[0])
        raise InputDataError(
            f"day id {labels[day]!r} is smaller than the day before it",
            path=str(path),
            line=first + 1,
        )

    blocks = [
        group.to_numpy(dtype=np.float64)
        for _, group in prices.groupby(codes, sort=False)
    ]

    return prices_to_log_returns(blocks, delta)


def prices_to_log_returns(
    blocks: Sequence[Sequence[float]], delta: Optional[float] = None
) -> ReturnGrid:
    """
    Converts per-day price blocks to a return panel.

    Each block holds the ``m + 1`` prices of one day. Returns are log
    differences of consecutive prices inside a block, so no return spans a
    day boundary.

    Parameters
    ----------
    blocks : sequence of sequences of float
        One block of strictly positive prices per day.

    delta : float, optional
        Slot length in years. Defaults to ``1 / (252 * m)``.

    Returns
    -------
    grid : ReturnGrid
        ``len(blocks)`` days of ``m`` returns each.
    """
    if len(blocks) == 0:
        raise StructuralError("at least one day of prices is required")

    arrays = [np.asarray(block, dtype=np.float64) for block in blocks]
    size = arrays[0].size

    for day, block in enumerate(arrays):
        if block.size != size:
            raise StructuralError(
                f"day {day} has {block.size} prices, expected {size}"
            )
        if np.any(~(block > 0)):
            raise DomainError(
                f"non-positive price {block[~(block > 0)][0]} on day {day}"
            )

    m = size - 1
    if delta is None:
        delta = default_delta(m)

    returns = np.diff(np.log(np.vstack(arrays)), axis=1)

    return ReturnGrid(returns.ravel(), m, len(arrays), delta)


def _parse_numbers(raw: "pd.Series[str]", path: str) -> "pd.Series[float]":
    stripped = raw.str.strip()
    try:
        values = stripped.astype(np.float64)
    except ValueError:
        values = stripped.map(_to_float).astype(np.float64)

    bad = np.flatnonzero(~np.isfinite(values.to_numpy(dtype=np.float64)))
    if bad.size == 0:
        return values

    index = int(bad[0])
    text = raw.iloc[index]

    if not isinstance(text, str) or not text.strip():
        problem = "empty line"
    else:
        try:
            float(text)
        except ValueError:
            problem = f"non-numeric value {text!r}"
        else:
            problem = f"non-finite value {text.strip()!r}"

    raise InputDataError(
        f"{problem} at index {index}", path=path, line=index + 1, index=index
    )


def _to_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return np.nan


def _read_text_table(
    path: PathType, names: List[str], skip_blank_lines: bool = True
) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            header=None,
            names=names,
            dtype=str,
            skip_blank_lines=skip_blank_lines,
            na_filter=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame({name: pd.Series([], dtype=str) for name in names})
    except pd.errors.ParserError as e:
        raise parser_error(e, path) from e


def parser_error(error: Exception, path: PathType) -> InputDataError:
    """Converts a pandas tokenizer error to an InputDataError with a line."""
    match = _TOKENIZER_ERROR.search(str(error))
    if match is None:
        return InputDataError(str(error).strip(), path=str(path))

    fields, line, seen = (int(group) for group in match.groups())
    return InputDataError(
        f"expected {fields} field(s), saw {seen}", path=str(path), line=line
    )
