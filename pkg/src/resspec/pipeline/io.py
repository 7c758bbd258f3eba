"""Reading region time series from CSV and simple preprocessing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import MIN_LENGTH, MultiSeries
from ..errors import InvalidArgumentError, ParseError

LONG_COLUMNS = ("time", "subject", "region", "value")


@dataclass(frozen=True)
class Dataset:
    """Region time series: rows are time points, columns are regions."""

    data: np.ndarray
    labels: tuple
    group: Optional[str] = None
    subjects: int = 1

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise InvalidArgumentError("dataset must be a 2-d table")
        if data.shape[1] < 2:
            raise InvalidArgumentError(f"need at least 2 regions, got {data.shape[1]}")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("dataset contains non-finite values")
        labels = tuple(str(s) for s in self.labels) if self.labels else tuple(
            str(i) for i in range(data.shape[1]))
        if len(labels) != data.shape[1]:
            raise InvalidArgumentError("one label per region is required")
        data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def regions(self) -> int:
        return self.data.shape[1]

    def column(self, key) -> np.ndarray:
        return self.data[:, self.index(key)]

    def index(self, key) -> int:
        """Column position for a label, or for an integer position given as int/str."""
        if isinstance(key, str) and key in self.labels:
            return self.labels.index(key)
        try:
            i = int(key)
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"unknown region {key!r}") from None
        if not 0 <= i < self.regions:
            raise InvalidArgumentError(f"region index {i} out of range 0..{self.regions - 1}")
        return i

    def series(self, keys) -> MultiSeries:
        idx = [self.index(k) for k in keys]
        return MultiSeries(self.data[:, idx], n_raw=self.length,
                           labels=tuple(self.labels[i] for i in idx))


def _number(cell: str, row: int, col: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", row, col) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite cell {cell!r}", row, col)
    return v


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh)]
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not valid UTF-8: {exc.reason}", 1, 1) from exc
    # drop fully blank lines (trailing newline artifacts), keep numbering honest
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise ParseError("empty file", 1, 1)
    return numbered


def load_csv(path, header: bool = True, long: bool = False,
             group: Optional[str] = None) -> Dataset:
    """Load a wide table (one column per region) or a long stack.

    Long input has columns ``time, subject, region, value``; every subject
    must cover the same times and regions, and the result is the per-region
    average across subjects.  Row and column numbers in errors are 1-based
    file positions.
    """
    rows = _read_rows(path)
    if long:
        return _load_long(rows, header, group)
    names = None
    if header:
        _, names = rows[0]
        names = [c.strip() for c in names]
        rows = rows[1:]
        if not rows:
            raise ParseError("no data rows after the header", 2, 1)
    width = len(names) if names is not None else len(rows[0][1])
    table = np.empty((len(rows), width))
    for k, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise ParseError(f"expected {width} cells, found {len(cells)}",
                             lineno, min(len(cells), width) + 1)
        for c, cell in enumerate(cells):
            table[k, c] = _number(cell.strip(), lineno, c + 1)
    return Dataset(table, tuple(names) if names else (), group)


def _load_long(rows, header, group):
    if header:
        lineno, names = rows[0]
        names = [c.strip().lower() for c in names]
        if tuple(names) != LONG_COLUMNS:
            raise ParseError(f"long format header must be {','.join(LONG_COLUMNS)}", lineno, 1)
        rows = rows[1:]
    if not rows:
        raise ParseError("no data rows", 1, 1)
    records = {}
    for lineno, cells in rows:
        if len(cells) != 4:
            raise ParseError(f"expected 4 cells, found {len(cells)}", lineno, min(len(cells), 4) + 1)
        t = _number(cells[0].strip(), lineno, 1)
        subject = cells[1].strip()
        region = cells[2].strip()
        value = _number(cells[3].strip(), lineno, 4)
        key = (subject, region, t)
        if key in records:
            raise ParseError(f"duplicate entry for subject {subject}, region {region}, time {t:g}",
                             lineno, 1)
        records[key] = value
    subjects = sorted({k[0] for k in records})
    regions = sorted({k[1] for k in records}, key=_natural)
    times = sorted({k[2] for k in records})
    expected = len(subjects) * len(regions) * len(times)
    if len(records) != expected:
        missing = next((s, r, t) for s in subjects for r in regions for t in times
                       if (s, r, t) not in records)
        raise ParseError(f"incomplete stack: no value for subject {missing[0]}, region "
                         f"{missing[1]}, time {missing[2]:g}", rows[-1][0], 1)
    cube = np.array([[[records[(s, r, t)] for r in regions] for t in times] for s in subjects])
    return Dataset(cube.mean(axis=0), tuple(regions), group, subjects=len(subjects))


def _natural(label):
    # numeric region ids sort numerically, others lexically after them
    try:
        return (0, float(label), "")
    except ValueError:
        return (1, 0.0, label)


def difference(d: Dataset, order: int = 1) -> Dataset:
    """Replace every region by its ``order``-th difference (``order`` in 0..2)."""
    if order not in (0, 1, 2):
        raise InvalidArgumentError(f"difference order must be 0, 1 or 2, got {order}")
    if d.length <= order + MIN_LENGTH:
        raise InvalidArgumentError(
            f"series of length {d.length} too short for order-{order} differencing")
    if order == 0:
        return d
    return Dataset(np.diff(d.data, n=order, axis=0), d.labels, d.group, d.subjects)
