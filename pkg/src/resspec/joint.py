"""Joint test over several lagged versions of the last covariate.

The model holds ``X0, X1..X_{K-1}`` plus ``L`` candidate covariates
``X_{K,u_1}..X_{K,u_L}`` (by default ``X1(t) X1(t-u)``).  The null says none
of them has a residual spectrum when it is the K-th covariate.  Everything is
computed on the ``(K+L)``-dimensional augmented spectral field; lag ``j``
sees the principal sub-matrix on ``0, 1..K-1, K-1+j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import EstimationConfig, MultiSeries, window_constants
from .decomposition import check_conditioning, phi_gradient, phi_numerator
from .errors import InvalidArgumentError, NumericalConsistencyError
from .residual import TestReport, _decide, _real, check_alpha, resolve_bandwidth
from .spectral import SpectralField, estimate_spectral_field


def lagged_products(x, u: int) -> np.ndarray:
    """``x(t) x(t-u)`` for ``t = u..n-1`` (length ``n - u``, not centered)."""
    x = np.asarray(x, dtype=float)
    u = int(u)
    if u < 0 or u >= x.shape[0]:
        raise InvalidArgumentError(f"lag {u} out of range for length {x.shape[0]}")
    return x[u:] * x[: x.shape[0] - u]


def quadratic_lag_map(covariates: Sequence[np.ndarray], u: int) -> np.ndarray:
    """Default map: ``X1(t) X1(t-u)``, aligned to ``t = u..n-1``."""
    return lagged_products(covariates[0], u)


def build_lagged_series(x0, covariates: Sequence, lag_set: Sequence[int],
                        lag_map: Optional[Callable] = None,
                        max_lag: Optional[int] = None) -> MultiSeries:
    """Assemble ``(X0, X1..X_{K-1}, X_{K,u_1}..X_{K,u_L})``.

    Parameters
    ----------
    x0 : array_like
        Response, length ``n_raw``.
    covariates : sequence of array_like
        ``X1..X_{K-1}``; at least one (the lag map reads them).
    lag_set : sequence of int
        Lags ``u_1..u_L``.
    lag_map : callable, optional
        ``lag_map(covariates, u)`` returns the constructed series for times
        ``u..n_raw-1``.  Defaults to :func:`quadratic_lag_map`.
    max_lag : int, optional
        Truncate as if the largest lag were ``max_lag`` (used to give several
        candidate lags a common sample).

    Every series is cut to the common length ``n_raw - max(lag_set)`` and the
    constructed covariates are mean-centered.
    """
    x0 = np.asarray(x0, dtype=float)
    covs = [np.asarray(c, dtype=float) for c in covariates]
    n = x0.shape[0]
    if not covs:
        raise InvalidArgumentError("at least one covariate is required")
    if any(c.shape != x0.shape for c in covs):
        raise InvalidArgumentError("response and covariates must have equal length")
    lags = [int(u) for u in lag_set]
    if not lags:
        raise InvalidArgumentError("lag set is empty")
    if min(lags) < 0:
        raise InvalidArgumentError("lags must be >= 0")
    top = max(lags) if max_lag is None else int(max_lag)
    if top < max(lags):
        raise InvalidArgumentError("max_lag is smaller than the largest lag")
    if not top < n / 4:
        raise InvalidArgumentError(f"largest lag {top} must be below n_raw/4 = {n / 4:g}")
    lag_map = lag_map or quadratic_lag_map
    cols = [x0[top:]] + [c[top:] for c in covs]
    labels = ["X0"] + [f"X{i}" for i in range(1, len(covs) + 1)]
    K = len(covs) + 1
    for u in lags:
        z = np.asarray(lag_map(covs, u), dtype=float)
        if z.shape != (n - u,):
            raise InvalidArgumentError(f"lag map returned shape {z.shape} for lag {u}")
        z = z[top - u:]
        cols.append(z - z.mean())
        labels.append(f"X{K},{u}")
    return MultiSeries(np.column_stack(cols), n_raw=n, max_construction_lag=top,
                       labels=tuple(labels))


@dataclass(frozen=True)
class AugmentedField:
    """Spectral field of the augmented series with the lag bookkeeping."""

    field: SpectralField
    K: int
    lags: tuple

    def __post_init__(self):
        if self.K < 1:
            raise InvalidArgumentError("K must be >= 1")
        if self.field.dims != self.K + len(self.lags):
            raise InvalidArgumentError(
                f"field has {self.field.dims} series, expected K + L = {self.K + len(self.lags)}")

    @property
    def L(self) -> int:
        return len(self.lags)

    @property
    def grid(self):
        return self.field.grid

    def sub_indices(self, j: int) -> list:
        """Augmented coordinates of the ``(K+1)``-dim field for lag ``j`` (0-based)."""
        return list(range(self.K)) + [self.K + j]

    def sub_field(self, j: int) -> SpectralField:
        return self.field.submatrix(self.sub_indices(j))

    def phi_index_sets(self, j: int):
        """Rows/columns (augmented coordinates) of the determinant giving ``Phi_{K,u_j}``."""
        return list(range(1, self.K)) + [self.K + j], list(range(1, self.K)) + [0]


def phi_vector(aug: AugmentedField) -> np.ndarray:
    """``Phi_{K,u_j}`` for every lag, shape ``(L, N)``."""
    f = aug.field.matrices
    out = np.empty((aug.L, f.shape[0]), dtype=complex)
    for j in range(aug.L):
        idx = np.asarray(aug.sub_indices(j))
        out[j] = phi_numerator(f[:, idx[:, None], idx[None, :]], aug.K)
    return out


def phi_gradients(aug: AugmentedField) -> np.ndarray:
    """``d Phi_{K,u_j} / dZ`` in augmented coordinates, shape ``(L, N, p, p)``."""
    f = aug.field.matrices
    return np.stack([phi_gradient(f, *aug.phi_index_sets(j)) for j in range(aug.L)])


def _vec(m: np.ndarray) -> np.ndarray:
    # column-major vec over the last two axes
    return np.swapaxes(m, -1, -2).reshape(*m.shape[:-2], -1)


def gamma_phi(aug: AugmentedField) -> np.ndarray:
    """Explicit ``sum_k vec(conj D_k) vec(D_k)^T``, shape ``(N, p^2, p^2)``.

    Memory grows as ``p^4``; the test itself uses :func:`joint_integrands`.
    """
    v = _vec(phi_gradients(aug))
    return np.einsum("kna,knb->nab", v.conj(), v)


def kron_spectral(f: np.ndarray) -> np.ndarray:
    """``f^T kron f`` at every node, so that it maps ``vec(X)`` to ``vec(f X f)``."""
    N, p, _ = f.shape
    return np.einsum("nba,ncd->nacbd", f, f).reshape(N, p * p, p * p)


def joint_integrands(aug: AugmentedField):
    """Bias and variance integrands without forming Kronecker products.

    With ``c_kl = tr(D_k^T f conj(D_l) f)``:

    * bias integrand ``tr(Gamma A) = sum_k c_kk``
    * variance integrand ``tr(Gamma A Gamma A) + tr(Gamma A Gamma^T(-lam) A)``,
      the second factor evaluated by reflecting the grid.

    Returns ``(bias, variance)``, each of shape ``(N,)``.
    """
    f = aug.field.matrices
    D = phi_gradients(aug)
    P = f[None] @ D.conj() @ f[None]
    c = np.einsum("knab,lnab->nkl", D, P)
    bias = np.einsum("nkk->n", c)
    direct = np.einsum("nkl,nlk->n", c, c)
    Dm = D[:, aug.grid.reflection]
    Q = f[None] @ Dm @ f[None]
    r1 = np.einsum("knab,lnab->nkl", D, Q)
    r2 = np.einsum("lnab,knab->nlk", Dm.conj(), P)
    reflected = np.einsum("nkl,nlk->n", r1, r2)
    return bias, direct + reflected


# The variance constant is 2*pi (not 4*pi) in front of the two-term integrand:
# for real data the reflected term equals the direct one, and with L = 1 this
# reproduces the single-lag variance 4*pi*eta4*int|c|^2.
VARIANCE_CONST = 2.0 * np.pi


def joint_test_field(aug: AugmentedField, n_eff: int, alpha: float = 0.05) -> TestReport:
    """Joint test on an already estimated augmented field."""
    check_alpha(alpha)
    field = aug.field
    window = window_constants(field.window)
    M = field.bandwidth
    check_conditioning(field, upto=field.K)
    grid = field.grid
    phi = phi_vector(aug)
    b, v = joint_integrands(aug)
    mu = _real(np.sqrt(M) * window.eta2 * grid.integrate(b), "joint bias")
    var = _real(VARIANCE_CONST * window.eta4 * grid.integrate(v), "joint variance")
    if not var > 0:
        raise NumericalConsistencyError(f"nonpositive joint variance {var!r}")
    T = n_eff / np.sqrt(M) * float(grid.integrate(np.sum(np.abs(phi) ** 2, axis=0))) - mu
    meta = {"n_eff": int(n_eff), "M": int(M), "K": aug.K, "lags": list(aug.lags),
            "window": field.window, "grid_size": grid.size}
    return _decide(T, mu, float(np.sqrt(var)), alpha, meta)


def augmented_field(x: MultiSeries, K: int, lags: Sequence[int],
                    config: Optional[EstimationConfig] = None) -> AugmentedField:
    config = config or EstimationConfig()
    M = resolve_bandwidth(config, x.n_eff)
    field = estimate_spectral_field(x, config.lag_window(), M, config.grid())
    return AugmentedField(field, int(K), tuple(int(u) for u in lags))


def run_joint_test(x0, covariates: Sequence, lag_set: Sequence[int], alpha: float = 0.05,
                   config: Optional[EstimationConfig] = None,
                   lag_map: Optional[Callable] = None) -> TestReport:
    """Test whether any lagged covariate ``X_{K,u}``, ``u`` in ``lag_set``, is needed.

    ``covariates`` are ``X1..X_{K-1}``, already in the model.  Rejects when
    ``T / sigma >= z_alpha``.
    """
    check_alpha(alpha)
    x = build_lagged_series(x0, covariates, lag_set, lag_map)
    aug = augmented_field(x, len(covariates) + 1, lag_set, config)
    return joint_test_field(aug, x.n_eff, alpha)
