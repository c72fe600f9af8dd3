"""Loading, normalization and description of raw mark data.

Raw inputs are integer counts of correct answers per student and study
subject.  Counts are normalized to the unit interval by dividing by the
number of items on each test, so that every column lives on [0, 1] and every
ordered pair of columns becomes a scatterplot inside the unit square.  The
explanatory/response roles of a pair are fixed at construction time and are
deliberately not interchangeable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ParseError",
    "ColumnSchema",
    "RawScores",
    "NormalizedSample",
    "PairedSample",
    "SummaryStats",
    "DEFAULT_SCHEMA",
    "load_csv",
    "normalize",
    "pair",
    "jitter",
    "summarize",
    "histogram",
]


class ParseError(ValueError):
    """Raised when an input file does not match the declared schema."""


@dataclass(frozen=True)
class ColumnSchema:
    """Score columns of an input file.

    ``names`` lists the score columns; ``max_items[j]`` is the number of items
    on test ``names[j]``, i.e. the largest admissible raw count.  A column
    named ``id_column``, if present in the file, is ignored by the loader.
    """

    names: tuple[str, ...]
    max_items: tuple[int, ...]
    id_column: str | None = "student_id"

    def __post_init__(self) -> None:
        if len(self.names) != len(self.max_items):
            raise ValueError("names and max_items must have equal length")
        if not self.names:
            raise ValueError("schema needs at least one score column")
        if any(m <= 0 for m in self.max_items):
            raise ValueError("max_items must be positive")


#: Default column layout: three study subjects with 65/45/80 test items.
DEFAULT_SCHEMA = ColumnSchema(
    names=("mathematics", "reading", "spelling"),
    max_items=(65, 45, 80),
)


@dataclass(frozen=True)
class RawScores:
    """Integer raw counts, one row per student, one column per subject."""

    column_names: tuple[str, ...]
    rows: np.ndarray  # shape (n, k), integer dtype
    max_items: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows)
        if rows.ndim != 2 or rows.shape[1] != len(self.column_names):
            raise ValueError("rows must be (n, k) with k = len(column_names)")
        if len(self.max_items) != len(self.column_names):
            raise ValueError("max_items must match column_names")
        if rows.size and rows.min() < 0:
            raise ValueError("raw counts must be non-negative")
        for j, name in enumerate(self.column_names):
            if rows.size and rows[:, j].max() > self.max_items[j]:
                raise ValueError(f"column '{name}' has a count above {self.max_items[j]}")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])


@dataclass(frozen=True)
class NormalizedSample:
    """Columns of marks normalized to the unit interval."""

    column_names: tuple[str, ...]
    columns: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        lengths = {len(self.columns[name]) for name in self.column_names}
        if len(lengths) > 1:
            raise ValueError("all columns must have equal length")
        for name in self.column_names:
            col = np.asarray(self.columns[name], dtype=float)
            if col.size and (col.min() < 0.0 or col.max() > 1.0):
                raise ValueError(f"column '{name}' has values outside [0, 1]")
            self.columns[name] = col

    @property
    def n(self) -> int:
        return len(self.columns[self.column_names[0]])


@dataclass(frozen=True)
class PairedSample:
    """An ordered scatterplot: x explains, y responds.

    ``pair(A, B)`` and ``pair(B, A)`` are different objects with different
    meanings; none of the downstream machinery treats them symmetrically.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise ValueError("x and y must be 1-d vectors of equal length")
        if len(x) < 2:
            raise ValueError("a paired sample needs at least 2 observations")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class SummaryStats:
    minimum: float
    q1: float
    median: float
    q3: float
    mean: float
    maximum: float
    sd: float


def load_csv(path: str | Path, schema: ColumnSchema = DEFAULT_SCHEMA) -> RawScores:
    """Read raw integer marks from a headed CSV file.

    Every schema column must appear in the header; cells must be integers in
    ``[0, max_items]``.  Errors name the offending row (1-based, counting data
    rows) and column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: no header row")
        missing = [c for c in schema.names if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for idx, record in enumerate(reader, start=1):
            row = []
            for name, cap in zip(schema.names, schema.max_items):
                cell = record.get(name)
                if cell is None or cell.strip() == "":
                    raise ParseError(f"{path}: row {idx}: column '{name}': empty cell")
                try:
                    value = int(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {idx}: column '{name}': non-integer value {cell!r}"
                    ) from None
                if value < 0:
                    raise ParseError(f"{path}: row {idx}: column '{name}': negative count {value}")
                if value > cap:
                    raise ParseError(
                        f"{path}: row {idx}: column '{name}': count {value} exceeds "
                        f"max_items {cap}"
                    )
                row.append(value)
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no rows")
    return RawScores(
        column_names=schema.names,
        rows=np.asarray(rows, dtype=np.int64),
        max_items=schema.max_items,
    )


def normalize(raw: RawScores) -> NormalizedSample:
    """Divide each raw count by its column's number of items."""
    columns = {
        name: raw.rows[:, j].astype(float) / raw.max_items[j]
        for j, name in enumerate(raw.column_names)
    }
    return NormalizedSample(column_names=raw.column_names, columns=columns)


def pair(sample: NormalizedSample, x_name: str, y_name: str) -> PairedSample:
    """Build the ordered pair with ``x_name`` explanatory and ``y_name`` response.

    Self-pairing (``x_name == y_name``) is allowed; it is occasionally useful
    as a diagnostic (the result is perfectly co-monotone).
    """
    for name in (x_name, y_name):
        if name not in sample.columns:
            raise ValueError(
                f"unknown column '{name}'; available: {', '.join(sample.column_names)}"
            )
    return PairedSample(x=sample.columns[x_name].copy(), y=sample.columns[y_name].copy())


def jitter(sample: PairedSample, sd: float, seed: int) -> PairedSample:
    """Add centered normal noise with standard deviation ``sd`` to both coordinates.

    The point of the noise is to break ties before rank computations without
    practically changing any value; sd around 1e-5 is appropriate for marks on
    [0, 1].  With ``sd == 0`` the sample is returned unchanged.  The result is
    a pure function of ``(sample, sd, seed)``; if a tie survives (probability
    zero in theory, near enough in floats), fresh draws are taken from the
    same seeded stream, up to 100 times.
    """
    if sd < 0:
        raise ValueError("sd must be >= 0")
    if sd == 0:
        return sample
    rng = np.random.default_rng(seed)
    n = sample.n
    for _ in range(100):
        x = sample.x + rng.normal(0.0, sd, size=n)
        y = sample.y + rng.normal(0.0, sd, size=n)
        if len(np.unique(x)) == n and len(np.unique(y)) == n:
            return PairedSample(x=x, y=y)
    raise RuntimeError("ties persist after 100 jitter retries")


def summarize(column: np.ndarray) -> SummaryStats:
    """Five-number summary plus mean and sample standard deviation.

    Quartiles use linear interpolation between order statistics at plotting
    positions (k-1)/(n-1) (numpy's default); the standard deviation uses
    divisor n-1.
    """
    col = np.asarray(column, dtype=float)
    if col.size == 0:
        raise ValueError("cannot summarize an empty column")
    q1, med, q3 = np.quantile(col, [0.25, 0.5, 0.75])
    sd = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
    return SummaryStats(
        minimum=float(col.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        mean=float(col.mean()),
        maximum=float(col.max()),
        sd=sd,
    )


def histogram(column: np.ndarray, bin_count: int) -> np.ndarray:
    """Counts over ``bin_count`` equal-width bins spanning [min, max].

    Bins are right-closed, (a, b], with the lowest bin additionally including
    the minimum, so the counts always sum to n.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    col = np.asarray(column, dtype=float)
    if col.size == 0:
        raise ValueError("cannot histogram an empty column")
    lo, hi = float(col.min()), float(col.max())
    if lo == hi:
        counts = np.zeros(bin_count, dtype=np.int64)
        counts[0] = col.size
        return counts
    edges = np.linspace(lo, hi, bin_count + 1)
    # side="left" puts a value equal to an edge into the bin below it
    idx = np.searchsorted(edges, col, side="left") - 1
    idx = np.clip(idx, 0, bin_count - 1)
    return np.bincount(idx, minlength=bin_count).astype(np.int64)
