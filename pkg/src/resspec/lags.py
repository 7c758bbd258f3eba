"""Choosing interaction lags by the size of the lagged residual spectrum.

For ``X_{2,u}(t) = X1(t) X1(t-u)`` the score of ``u`` is either the integral
of the order-2 residual spectrum (the integrated criterion, which maximizes
explained variance) or the peak of its ratio to ``f_00`` (the peak
criterion, a residual-coherence maximum).  All candidates share the sample
``n_raw - L_max`` so their scores are comparable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import EstimationConfig
from .decomposition import decompose
from .errors import InvalidArgumentError, NumericalConsistencyError
from .joint import build_lagged_series
from .spectral import field_from_config

CRITERIA = ("integrated", "peak")
MAX_DEFAULT_LAG = 20


@dataclass(frozen=True)
class LagScore:
    """Score of one candidate lag (or lag tuple)."""

    lag: object
    score: float
    criterion: str
    curve: np.ndarray = field(repr=False)
    f00: np.ndarray = field(repr=False)

    def to_dict(self, with_curve: bool = False) -> dict:
        out = {"lag": list(self.lag) if isinstance(self.lag, tuple) else int(self.lag),
               "score": self.score, "criterion": self.criterion}
        if with_curve:
            out["curve"] = self.curve.tolist()
        return out


@dataclass(frozen=True)
class LagSelection:
    """Winning lag plus every candidate's score, in candidate order."""

    best: LagScore
    scores: tuple

    @property
    def lag(self):
        return self.best.lag

    @property
    def score(self) -> float:
        return self.best.score


def _check_criterion(criterion):
    if criterion not in CRITERIA:
        raise InvalidArgumentError(f"criterion must be one of {CRITERIA}, got {criterion!r}")


def _residual_curve(x0, covariates, lags, lag_map, max_lag, config):
    x = build_lagged_series(x0, covariates, lags, lag_map, max_lag=max_lag)
    f = field_from_config(x, config)
    dec = decompose(f)
    return dec.residual_spectra[-1], dec.f00


def lagged_residual_spectrum(x0, x1, u: int, config: Optional[EstimationConfig] = None,
                             max_lag: Optional[int] = None) -> np.ndarray:
    """``f_{G2G2}(lam, u)`` for the model ``X0 ~ X1, X1(t) X1(t-u)``.

    ``max_lag`` sets the common truncation (defaults to ``u``).
    """
    config = config or EstimationConfig()
    if int(u) < 0:
        raise InvalidArgumentError("lag must be >= 0")
    return _residual_curve(x0, [x1], [u], None, max_lag, config)[0]


def _score(curve, f00, criterion, grid):
    if criterion == "integrated":
        s = float(grid.integrate(curve))
    else:
        s = float(np.max(curve / f00))
    if not np.isfinite(s) or s < 0:
        raise NumericalConsistencyError(f"invalid lag score {s!r}")
    return s


def _pick(scores):
    # first maximum wins, candidates come in increasing lag order
    best = max(range(len(scores)), key=lambda i: (scores[i].score, -i))
    return LagSelection(scores[best], tuple(scores))


def select_lag(x0, x1, L_max: int, criterion: str = "integrated",
               config: Optional[EstimationConfig] = None) -> LagSelection:
    """``u_hat = argmax_{u <= L_max} score(u)``; ties go to the smaller lag."""
    _check_criterion(criterion)
    config = config or EstimationConfig()
    L_max = int(L_max)
    if L_max < 0:
        raise InvalidArgumentError("L_max must be >= 0")
    grid = config.grid()
    scores = []
    for u in range(L_max + 1):
        curve, f00 = _residual_curve(x0, [x1], [u], None, L_max, config)
        scores.append(LagScore(u, _score(curve, f00, criterion, grid), criterion, curve, f00))
    return _pick(scores)


def product_lag_map(covariates: Sequence[np.ndarray], lags: Sequence[int]) -> np.ndarray:
    """``X1(t) prod_j X_j(t - u_j)`` aligned to ``t = max(u)..n-1``.

    With one covariate this is the quadratic family ``X1(t) X1(t-u)``.
    """
    top = max(lags)
    n = covariates[0].shape[0]
    out = covariates[0][top:].copy()
    for c, u in zip(covariates, lags):
        out = out * c[top - u: n - u]
    return out


def select_lags(x0, covariates: Sequence, L_max: int, criterion: str = "integrated",
                config: Optional[EstimationConfig] = None,
                lag_map: Optional[Callable] = None) -> LagSelection:
    """Exhaustive search over ``{0..L_max}^(K-1)`` for the K-th covariate's lags.

    ``covariates`` are ``X1..X_{K-1}``; the candidate covariate for
    ``(u_1..u_{K-1})`` is ``lag_map(covariates, lags)`` (default
    :func:`product_lag_map`), aligned to times ``max(lags)..n-1``.  Tuples are
    visited in lexicographic order and ties go to the first one.
    """
    _check_criterion(criterion)
    config = config or EstimationConfig()
    covs = [np.asarray(c, dtype=float) for c in covariates]
    if not covs:
        raise InvalidArgumentError("at least one covariate is required")
    L_max = int(L_max)
    if L_max < 0:
        raise InvalidArgumentError("L_max must be >= 0")
    lag_map = lag_map or product_lag_map
    grid = config.grid()
    scores = []
    for lags in itertools.product(range(L_max + 1), repeat=len(covs)):
        # the constructed series starts at t = max(lags), like a single lag of that size
        curve, f00 = _residual_curve(x0, covs, [max(lags)],
                                     lambda cs, _u, lags=lags: lag_map(cs, lags),
                                     L_max, config)
        scores.append(LagScore(tuple(lags), _score(curve, f00, criterion, grid),
                               criterion, curve, f00))
    return _pick(scores)
