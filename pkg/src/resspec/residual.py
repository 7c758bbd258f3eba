"""L2 test for the existence of the order-K residual spectrum.

Tests ``H0: f_{G_K G_K} = 0`` (equivalently ``phi_K(f) = 0`` a.e.), i.e.
whether the last covariate adds anything once ``X1..X_{K-1}`` are in the
model.  The statistic is a bias-corrected integrated ``|phi_K(f_hat)|^2``,
calibrated against a standard normal upper tail.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from .core import EstimationConfig, LagWindow, MultiSeries, window_constants
from .decomposition import (check_conditioning, det, leading_block, phi_K,
                            phi_gradient, phi_index_sets)
from .errors import InvalidArgumentError, NumericalConsistencyError
from .spectral import SpectralField, default_bandwidth, estimate_spectral_field


@dataclass(frozen=True)
class TestReport:
    """Outcome of a single or joint residual-spectrum test."""

    __test__ = False  # not a pytest class

    statistic: float
    bias: float
    sigma_hat: float
    z: float
    p_value: float
    alpha: float
    reject: bool
    meta: dict = field(default_factory=dict)
    warning: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def schur_terms(field: SpectralField):
    """``det(f_{K-1})``, ``S_0`` and ``S_K`` at every node.

    ``S_0`` (``S_K``) is ``f_00`` (``f_KK``) minus its projection on the
    spectra of covariates ``1..K-1``.  For ``K = 1`` the projections are empty
    and the determinant is 1.
    """
    f = field.matrices
    K = field.K
    if K < 1:
        raise InvalidArgumentError("need at least one covariate")
    if K == 1:
        return np.ones(f.shape[0]), f[:, 0, 0].real, f[:, 1, 1].real
    check_conditioning(field, upto=K - 1)
    F = leading_block(f, K - 1)
    w0 = f[:, 1:K, 0]
    wK = f[:, 1:K, K]
    s0 = f[:, 0, 0] - np.einsum("ni,ni->n", w0.conj(), np.linalg.solve(F, w0[..., None])[..., 0])
    sK = f[:, K, K] - np.einsum("ni,ni->n", wK.conj(), np.linalg.solve(F, wK[..., None])[..., 0])
    return det(F), s0, sK


def _schur_integrand(field: SpectralField) -> np.ndarray:
    dF, s0, sK = schur_terms(field)
    return dF ** 2 * s0 * sK


def _real(value, what, tol=1e-8):
    value = complex(value)
    if abs(value.imag) > tol * max(1.0, abs(value)):
        raise NumericalConsistencyError(f"{what} has imaginary residue {value.imag:.3g}")
    return value.real


def bias_mu_hat(field: SpectralField, M: int, window: LagWindow) -> float:
    """Closed-form bias ``sqrt(M) eta2 int det(f_{K-1})^2 S_0 S_K d lam``."""
    g = _schur_integrand(field)
    return _real(np.sqrt(M) * window.eta2 * field.grid.integrate(g), "bias")


def trace_integrand(field: SpectralField) -> np.ndarray:
    """``tr(D^T f conj(D) f)`` with ``D`` the gradient of ``phi_K`` at ``f``."""
    f = field.matrices
    rows, cols = phi_index_sets(field.K)
    D = phi_gradient(f, rows, cols)
    P = f @ D.conj() @ f
    return np.einsum("nab,nab->n", D, P)


def bias_mu_trace(field: SpectralField, M: int, window: LagWindow) -> float:
    """Bias from the derivative (trace) form; equals :func:`bias_mu_hat` when ``phi_K = 0``."""
    g = trace_integrand(field)
    return _real(np.sqrt(M) * window.eta2 * field.grid.integrate(g), "bias")


def variance_sigma_hat(field: SpectralField, window: LagWindow) -> float:
    """``sigma_K = sqrt(4 pi eta4 int |det(f_{K-1})^2 S_0 S_K|^2 d lam)``."""
    g = _schur_integrand(field)
    var = 4.0 * np.pi * window.eta4 * field.grid.integrate(np.abs(g) ** 2)
    if not var > 0:
        raise NumericalConsistencyError(f"nonpositive variance integral {var!r}")
    return float(np.sqrt(var))


def integrated_phi(field: SpectralField) -> float:
    """``int |phi_K(f)|^2 d lam``."""
    return float(field.grid.integrate(np.abs(phi_K(field)) ** 2))


def test_statistic(field: SpectralField, n_eff: int, M: int, window: LagWindow) -> float:
    """``T_n = (n / sqrt(M)) int |phi_K(f_hat)|^2 d lam - mu_hat``.

    The bias is the plug-in derivative form, so ``T_n`` coincides with the
    joint statistic for a single lag.
    """
    return n_eff / np.sqrt(M) * integrated_phi(field) - bias_mu_trace(field, M, window)


test_statistic.__test__ = False


def _decide(T, mu, sigma, alpha, meta):
    z_alpha = float(ndtri(1.0 - alpha))
    warning = None
    if not np.isfinite(sigma) or sigma <= 1e-300:
        warning = "degenerate input: variance estimate is numerically zero"
        warnings.warn(warning, RuntimeWarning, stacklevel=3)
        z = -np.inf
    else:
        z = T / sigma
    p = float(ndtr(-z))
    return TestReport(float(T), float(mu), float(sigma), float(z), p, float(alpha),
                      bool(z >= z_alpha), meta, warning)


def check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")


def resolve_bandwidth(config: EstimationConfig, n_eff: int) -> int:
    if config.bandwidth is not None:
        return int(config.bandwidth)
    return default_bandwidth(n_eff, config.bandwidth_const)


def test_field(field: SpectralField, n_eff: int, alpha: float = 0.05) -> TestReport:
    """Run the test on an already estimated field."""
    check_alpha(alpha)
    window = window_constants(field.window)
    M = field.bandwidth
    check_conditioning(field)
    mu = bias_mu_trace(field, M, window)
    T = n_eff / np.sqrt(M) * integrated_phi(field) - mu
    sigma = variance_sigma_hat(field, window)
    meta = {"n_eff": int(n_eff), "M": int(M), "K": field.K, "window": field.window,
            "grid_size": field.grid.size}
    return _decide(T, mu, sigma, alpha, meta)


test_field.__test__ = False


def run_test(x: MultiSeries, alpha: float = 0.05, config: Optional[EstimationConfig] = None) -> TestReport:
    """Test whether the last column of ``x`` has a residual spectrum.

    Column 0 is the response; columns ``1..K-1`` are covariates already in the
    model; column ``K`` is the covariate under test.
    """
    check_alpha(alpha)
    if x.K < 1:
        raise InvalidArgumentError("need a response and at least one covariate")
    config = config or EstimationConfig()
    M = resolve_bandwidth(config, x.n_eff)
    field = estimate_spectral_field(x, config.lag_window(), M, config.grid())
    return test_field(field, x.n_eff, alpha)
