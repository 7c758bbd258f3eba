"""Shared numeric containers: series, frequency grid, lag windows, config."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InvalidArgumentError

MIN_LENGTH = 8
MIN_GRID = 64
DEFAULT_GRID = 512
DANIELL_TRUNCATION = 8.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultiSeries:
    """Aligned real observations ``X0, X1, ..., XK`` (columns) over time (rows).

    ``data`` already excludes the first ``max_construction_lag`` raw time
    points, so ``n_eff = n_raw - max_construction_lag``.
    """

    data: np.ndarray
    n_raw: int
    max_construction_lag: int = 0
    labels: tuple = ()

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2:
            raise InvalidArgumentError("series data must be a 2-d array (time x series)")
        if self.max_construction_lag < 0:
            raise InvalidArgumentError("max_construction_lag must be >= 0")
        if data.shape[0] != self.n_raw - self.max_construction_lag:
            raise InvalidArgumentError(
                f"data has {data.shape[0]} rows, expected n_raw - lag = "
                f"{self.n_raw - self.max_construction_lag}"
            )
        if data.shape[0] < MIN_LENGTH:
            raise InvalidArgumentError(
                f"effective length {data.shape[0]} is below the minimum of {MIN_LENGTH}"
            )
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("series contain non-finite values")
        labels = tuple(self.labels) if self.labels else tuple(
            f"X{i}" for i in range(data.shape[1]))
        if len(labels) != data.shape[1]:
            raise InvalidArgumentError("one label per column is required")
        object.__setattr__(self, "data", _readonly(data))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_columns(cls, *columns, labels=()):
        data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
        return cls(data, n_raw=data.shape[0], labels=labels)

    @property
    def n_eff(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> int:
        return self.data.shape[1]

    @property
    def K(self) -> int:
        """Number of covariates (columns after the response)."""
        return self.data.shape[1] - 1

    def select(self, columns: Sequence[int]) -> "MultiSeries":
        cols = list(columns)
        return MultiSeries(self.data[:, cols], self.n_raw, self.max_construction_lag,
                           tuple(self.labels[c] for c in cols))


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid ``lambda_j = -pi + 2*pi*j/N`` for ``j = 1..N``."""

    frequencies: np.ndarray
    weight: float

    @property
    def size(self) -> int:
        return self.frequencies.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, self.weight)

    @property
    def reflection(self) -> np.ndarray:
        """Index map ``i -> i'`` with ``lambda_{i'} = -lambda_i`` (pi maps to itself)."""
        n = self.size
        return (n - 2 - np.arange(n)) % n

    def integrate(self, values, axis=0):
        """Riemann sum of ``values`` sampled on the grid along ``axis``."""
        return self.weight * np.sum(values, axis=axis)


def make_grid(N: int = DEFAULT_GRID) -> FrequencyGrid:
    return _make_grid(N)


@lru_cache(maxsize=16)
def _make_grid(N) -> FrequencyGrid:
    if isinstance(N, bool) or int(N) != N:
        raise InvalidArgumentError(f"grid size must be an integer, got {N!r}")
    N = int(N)
    if N % 2 or N < MIN_GRID:
        raise InvalidArgumentError(f"grid size must be even and >= {MIN_GRID}, got {N}")
    j = np.arange(1, N + 1)
    freqs = -np.pi + 2.0 * np.pi * j / N
    return FrequencyGrid(_readonly(freqs), 2.0 * np.pi / N)


def _parzen(x):
    a = np.abs(np.asarray(x, dtype=float))
    return np.where(a <= 0.5, 1.0 - 6.0 * a**2 + 6.0 * a**3,
                    np.where(a <= 1.0, 2.0 * (1.0 - a) ** 3, 0.0))


def _bartlett(x):
    a = np.abs(np.asarray(x, dtype=float))
    return np.where(a <= 1.0, 1.0 - a, 0.0)


def _daniell(x):
    return np.sinc(np.asarray(x, dtype=float))


def _piecewise_power_integral(pieces, power):
    # pieces: (poly, lo, hi) on the positive half-line; omega is even
    total = 0.0
    for poly, lo, hi in pieces:
        antider = (poly ** power).integ()
        total += antider(hi) - antider(lo)
    return 2.0 * total


_PARZEN_PIECES = [
    (Polynomial([1.0, 0.0, -6.0, 6.0]), 0.0, 0.5),
    (Polynomial([2.0, -6.0, 6.0, -2.0]), 0.5, 1.0),
]
_BARTLETT_PIECES = [(Polynomial([1.0, -1.0]), 0.0, 1.0)]


@dataclass(frozen=True)
class LagWindow:
    """Lag window ``omega`` with its L2/L4 constants.

    ``truncation`` is the multiple of the bandwidth beyond which the lag sum
    is cut: the support edge for compact windows, ``8`` for Daniell.
    """

    name: str
    omega: Callable = field(repr=False)
    eta2: float
    eta4: float
    truncation: float
    compact: bool


@lru_cache(maxsize=None)
def window_constants(name: str = "parzen") -> LagWindow:
    """Return the lag window called ``name`` with exact ``eta2``/``eta4``.

    Bartlett's spectral kernel has infinite second moment, which the
    asymptotic theory excludes; it is offered for comparison only.
    """
    key = str(name).lower()
    if key == "parzen":
        return LagWindow("parzen", _parzen,
                         _piecewise_power_integral(_PARZEN_PIECES, 2),
                         _piecewise_power_integral(_PARZEN_PIECES, 4), 1.0, True)
    if key == "bartlett":
        return LagWindow("bartlett", _bartlett,
                         _piecewise_power_integral(_BARTLETT_PIECES, 2),
                         _piecewise_power_integral(_BARTLETT_PIECES, 4), 1.0, True)
    if key == "daniell":
        # int sinc^2 = 1, int sinc^4 = 2/3
        return LagWindow("daniell", _daniell, 1.0, 2.0 / 3.0, DANIELL_TRUNCATION, False)
    raise InvalidArgumentError(f"unknown lag window {name!r}; expected parzen, bartlett or daniell")


WINDOWS = ("parzen", "bartlett", "daniell")


@dataclass(frozen=True)
class EstimationConfig:
    """Knobs shared by every estimator-driven operation.

    ``bandwidth=None`` selects :func:`resspec.spectral.default_bandwidth`.
    """

    window: str = "parzen"
    bandwidth: Optional[int] = None
    bandwidth_const: float = 1.5
    grid_size: int = DEFAULT_GRID

    def __post_init__(self):
        window_constants(self.window)
        if self.bandwidth is not None and int(self.bandwidth) < 2:
            raise InvalidArgumentError("bandwidth must be >= 2")
        if self.bandwidth_const <= 0:
            raise InvalidArgumentError("bandwidth_const must be positive")
        make_grid(self.grid_size)

    def lag_window(self) -> LagWindow:
        return window_constants(self.window)

    def grid(self) -> FrequencyGrid:
        return make_grid(self.grid_size)

    def as_dict(self) -> dict:
        return {"window": self.window, "bandwidth": self.bandwidth,
                "bandwidth_const": self.bandwidth_const, "grid_size": self.grid_size}
