"""Data generators for the 14 benchmark cases and a Monte Carlo size/power driver.

Drivers ``X1..X3`` are AR(1) with coefficient 0.4 and standard normal
innovations; ``X4 = X2 + e4``.  Each case fixes a response formula and which
covariate's existence is tested.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from .core import EstimationConfig, MultiSeries
from .errors import InvalidArgumentError, ResSpecError
from .residual import run_test

AR_COEF = 0.4
BURN_IN = 500
MIN_N = 100


@dataclass(frozen=True)
class SimCase:
    """One benchmark row.

    ``response`` maps driver names (``X1``..``X4``, ``X1sq`` for ``X1(t)^2``)
    to coefficients; ``X0`` always carries its own ``e0``.  ``covariates`` are
    the series in the fitted model, the last one being tested; ``("lag", u)``
    denotes ``X1(t) X1(t-u)``.
    """

    id: int
    response: tuple
    covariates: tuple

    @property
    def K(self) -> int:
        return len(self.covariates)

    @property
    def construction_lag(self) -> int:
        return max((c[1] for c in self.covariates if isinstance(c, tuple)), default=0)

    def describe(self) -> str:
        terms = " + ".join(("" if c == 1 else f"{c:g}*") + name for name, c in self.response)
        rhs = f"{terms} + e0" if terms else "e0"
        tested = self.covariates[-1]
        tested = f"X1(t)X1(t-{tested[1]})" if isinstance(tested, tuple) else tested
        return f"X0 = {rhs}; test {tested}"


def _case(i, response, covariates):
    return SimCase(i, tuple(response.items()), tuple(covariates))


_NL = {"X1": 1.0, "X1sq": 0.05}

CASES = {c.id: c for c in [
    _case(1, {}, ["X1"]),
    _case(2, {"X1": 0.05}, ["X1"]),
    _case(3, {"X1": 0.1}, ["X1"]),
    _case(4, {"X1": 1.0}, ["X1", "X2"]),
    _case(5, {"X1": 1.0, "X2": 0.05}, ["X1", "X2"]),
    _case(6, {"X1": 1.0, "X2": 0.1}, ["X1", "X2"]),
    _case(7, {"X1": 1.0, "X2": 1.0}, ["X1", "X2", "X3"]),
    _case(8, {"X1": 1.0, "X2": 1.0, "X3": 0.05}, ["X1", "X2", "X3"]),
    _case(9, {"X1": 1.0, "X2": 1.0, "X3": 0.1}, ["X1", "X2", "X3"]),
    _case(10, {"X1": 1.0, "X2": 1.0, "X4": 0.05}, ["X1", "X2", "X4"]),
    _case(11, _NL, ["X1", ("lag", 0)]),
    _case(12, _NL, ["X1", ("lag", 1)]),
    _case(13, _NL, ["X1", ("lag", 2)]),
    _case(14, _NL, ["X1", ("lag", 3)]),
]}

# Reference rejection rates for n = 250, 500, 1000, 2000 at alpha = 0.05.
REFERENCE_RATES = {
    1: (0.068, 0.085, 0.066, 0.068), 2: (0.156, 0.224, 0.333, 0.532),
    3: (0.369, 0.631, 0.865, 0.990), 4: (0.069, 0.075, 0.069, 0.059),
    5: (0.148, 0.214, 0.284, 0.430), 6: (0.353, 0.550, 0.768, 0.964),
    7: (0.069, 0.074, 0.061, 0.062), 8: (0.140, 0.186, 0.291, 0.420),
    9: (0.306, 0.511, 0.736, 0.936), 10: (0.114, 0.13, 0.173, 0.214),
    11: (0.213, 0.277, 0.465, 0.720), 12: (0.148, 0.212, 0.315, 0.510),
    13: (0.075, 0.108, 0.145, 0.201), 14: (0.081, 0.075, 0.077, 0.107),
}
REFERENCE_N = (250, 500, 1000, 2000)


def get_case(case_id: int) -> SimCase:
    try:
        return CASES[int(case_id)]
    except (KeyError, ValueError, TypeError):
        raise InvalidArgumentError(f"unknown case id {case_id!r}; expected 1..14") from None


def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator from an int or a ``SeedSequence``."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def replication_seed(seed: int, case_id: int, n: int, rep: int) -> np.random.SeedSequence:
    """Stream for one replication; depends only on its coordinates, never on scheduling."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(case_id), int(n), int(rep)))


def ar1(innovations: np.ndarray, coef: float = AR_COEF) -> np.ndarray:
    """Filter innovations (time along axis 0) through ``x(t) = coef x(t-1) + e(t)``."""
    return lfilter([1.0], [1.0, -coef], innovations, axis=0)


def generate_case(case_id: int, n: int, seed) -> MultiSeries:
    """Simulate ``n`` observations of a benchmark case.

    Columns are ``X0`` followed by the case's covariates in model order.
    Lagged-product covariates shorten the sample to ``n - u``.
    """
    case = get_case(case_id)
    if n < MIN_N:
        raise InvalidArgumentError(f"n must be >= {MIN_N}")
    rng = make_rng(seed)
    eps = rng.standard_normal((n + BURN_IN, 5))
    drivers = ar1(eps[:, 1:4])[BURN_IN:]
    e = eps[BURN_IN:]
    series = {"X1": drivers[:, 0], "X2": drivers[:, 1], "X3": drivers[:, 2]}
    series["X4"] = series["X2"] + e[:, 4]
    series["X1sq"] = series["X1"] ** 2
    x0 = e[:, 0].copy()
    for name, coef in case.response:
        x0 += coef * series[name]

    u_max = case.construction_lag
    cols, labels = [x0[u_max:]], ["X0"]
    for cov in case.covariates:
        if isinstance(cov, tuple):
            u = cov[1]
            prod = series["X1"][u:] * series["X1"][: n - u]
            prod = prod[u_max - u:]
            cols.append(prod - prod.mean())
            labels.append(f"X1*X1(-{u})")
        else:
            cols.append(series[cov][u_max:])
            labels.append(cov)
    return MultiSeries(np.column_stack(cols), n_raw=n, max_construction_lag=u_max,
                       labels=tuple(labels))


@dataclass(frozen=True)
class MCResult:
    case_id: int
    n: int
    replications: int
    alpha: float
    rate: float
    seed: int
    wall_time: float
    rejections: int = 0
    failures: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _run_chunk(case_id, n, reps, alpha, seed, config):
    hits = 0
    for r in reps:
        x = generate_case(case_id, n, replication_seed(seed, case_id, n, r))
        try:
            hits += run_test(x, alpha, config).reject
        except ResSpecError as exc:
            raise type(exc)(f"case {case_id}, n={n}, replication {r}: {exc}") from exc
    return hits


def monte_carlo(case_id: int, n: int, replications: int = 1000, alpha: float = 0.05,
                seed: int = 0, config: Optional[EstimationConfig] = None,
                workers: int = 1) -> MCResult:
    """Empirical rejection rate of the test over independent replications.

    Replication ``r`` always draws from ``replication_seed(seed, case, n, r)``,
    so the rate does not depend on ``workers``.
    """
    get_case(case_id)
    if replications < 1:
        raise InvalidArgumentError("replications must be >= 1")
    config = config or EstimationConfig()
    start = time.perf_counter()
    reps = np.arange(replications)
    if workers <= 1:
        hits = _run_chunk(case_id, n, reps, alpha, seed, config)
    else:
        from joblib import Parallel, delayed
        chunks = np.array_split(reps, workers)
        hits = sum(Parallel(n_jobs=workers)(
            delayed(_run_chunk)(case_id, n, c, alpha, seed, config) for c in chunks if len(c)))
    elapsed = time.perf_counter() - start
    return MCResult(int(case_id), int(n), int(replications), float(alpha),
                    hits / replications, int(seed), elapsed, int(hits))


def reference_rate(case_id: int, n: int) -> Optional[float]:
    """Reference rejection rate for ``(case, n)``, if tabulated."""
    try:
        return REFERENCE_RATES[case_id][REFERENCE_N.index(n)]
    except (KeyError, ValueError):
        return None


def power_curve(case_id: int, ns: Sequence[int] = REFERENCE_N, **kwargs) -> list:
    return [monte_carlo(case_id, n, **kwargs) for n in ns]
