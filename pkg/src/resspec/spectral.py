"""Lag-window kernel estimate of the spectral density matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrequencyGrid, LagWindow, MultiSeries, MIN_LENGTH
from .errors import InvalidArgumentError, SingularSpectrumError

MIN_BANDWIDTH_FLOOR = 4
BANDWIDTH_EXPONENT = 0.3


@dataclass(frozen=True)
class SpectralField:
    """Estimated ``(K+1) x (K+1)`` spectral matrices at every grid node.

    ``matrices`` has shape ``(N, dims, dims)``; node ``i`` sits at
    ``grid.frequencies[i]``.
    """

    grid: FrequencyGrid
    matrices: np.ndarray
    bandwidth: int
    window: str

    @property
    def dims(self) -> int:
        return self.matrices.shape[1]

    @property
    def K(self) -> int:
        return self.matrices.shape[1] - 1

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.matrices[:, i, j]

    def submatrix(self, indices) -> "SpectralField":
        idx = np.asarray(indices)
        return SpectralField(self.grid, self.matrices[:, idx[:, None], idx[None, :]],
                             self.bandwidth, self.window)


def sample_autocovariance(x: MultiSeries, i: int, j: int, h: int) -> float:
    """``gamma_ij(h)``: mean of ``(X_i(t+h)-mean_i)(X_j(t)-mean_j)`` over the overlap.

    The divisor is the number of overlapping terms ``n_eff - |h|``, and the
    means are taken once over the full effective sample.
    """
    n = x.n_eff
    h = int(h)
    if abs(h) > n - 2:
        raise InvalidArgumentError(f"|h|={abs(h)} exceeds n_eff - 2 = {n - 2}")
    xc = x.data - x.data.mean(axis=0)
    if h >= 0:
        return float(np.dot(xc[h:, i], xc[: n - h, j]) / (n - h))
    return float(np.dot(xc[: n + h, i], xc[-h:, j]) / (n + h))


def autocovariance_matrices(data: np.ndarray, max_lag: int) -> np.ndarray:
    """Stack ``G[h] = (gamma_ij(h))_ij`` for ``h = 0..max_lag`` (shape ``(H+1, p, p)``)."""
    n = data.shape[0]
    xc = data - data.mean(axis=0)
    out = np.empty((max_lag + 1, data.shape[1], data.shape[1]))
    for h in range(max_lag + 1):
        out[h] = xc[h:].T @ xc[: n - h] / (n - h)
    return out


def default_bandwidth(n_eff: int, const: float = 1.5) -> int:
    """``max(4, round(const * n_eff**0.3))``.

    The exponent sits strictly between 2/9 and 1/3, so both
    ``n / M**4.5 -> 0`` and ``n / M**3 -> inf`` hold.
    """
    if n_eff < MIN_LENGTH:
        raise InvalidArgumentError(f"n_eff must be >= {MIN_LENGTH}")
    return max(MIN_BANDWIDTH_FLOOR, int(round(const * n_eff ** BANDWIDTH_EXPONENT)))


def max_lag_for(window: LagWindow, M: int, n_eff: int) -> int:
    """Largest lag carrying non-zero weight, capped at ``n_eff - 2``."""
    H = int(np.floor(window.truncation * M))
    if window.compact and H >= window.truncation * M:
        H -= 1  # omega vanishes at the support edge
    return max(0, min(H, n_eff - 2))


def _hermitize(f: np.ndarray) -> np.ndarray:
    p = f.shape[-1]
    iu = np.triu_indices(p, 1)
    out = np.empty_like(f)
    d = np.arange(p)
    out[:, d, d] = f[:, d, d].real
    out[:, iu[0], iu[1]] = f[:, iu[0], iu[1]]
    out[:, iu[1], iu[0]] = np.conj(f[:, iu[0], iu[1]])
    return out


def estimate_spectral_field(x: MultiSeries, window: LagWindow, M: int,
                            grid: FrequencyGrid, method: str = "direct") -> SpectralField:
    """Kernel estimate ``f_ij(lam) = (1/2pi) sum_h omega(h/M) gamma_ij(h) exp(-i h lam)``.

    Parameters
    ----------
    x : MultiSeries
    window : LagWindow
    M : int
        Bandwidth, at least 2.
    grid : FrequencyGrid
    method : {"direct", "fft"}
        ``"direct"`` sums the lag series at each node (reference path);
        ``"fft"`` folds lags modulo ``N`` and uses one FFT per entry.

    Raises
    ------
    SingularSpectrumError
        If any column has zero sample variance.
    """
    if M < 2:
        raise InvalidArgumentError("bandwidth M must be >= 2")
    data = x.data
    scale = np.max(np.abs(data), axis=0)
    var = data.var(axis=0)
    bad = np.flatnonzero(var <= 1e-24 * np.maximum(scale, 1e-300) ** 2)
    if bad.size:
        names = ", ".join(x.labels[b] for b in bad)
        raise SingularSpectrumError(f"zero-variance series: {names}")

    H = max_lag_for(window, M, x.n_eff)
    G = autocovariance_matrices(data, H)
    lags = np.arange(H + 1)
    w = window.omega(lags / M)
    if method == "direct":
        f = _direct(G, w, lags, grid.frequencies)
    elif method == "fft":
        f = _fft(G, w, grid.size)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    return SpectralField(grid, _hermitize(f), int(M), window.name)


def _direct(G, w, lags, freqs):
    # G_h e^{-ih lam} + G_h^T e^{ih lam} = S_h cos(h lam) - i A_h sin(h lam)
    Gw = G * w[:, None, None]
    S = Gw[1:] + np.swapaxes(Gw[1:], 1, 2)
    A = Gw[1:] - np.swapaxes(Gw[1:], 1, 2)
    ang = np.outer(freqs, lags[1:])
    re = Gw[0][None] + np.tensordot(np.cos(ang), S, axes=(1, 0))
    im = -np.tensordot(np.sin(ang), A, axes=(1, 0))
    return (re + 1j * im) / (2.0 * np.pi)


def _fft(G, w, N):
    p = G.shape[1]
    H = G.shape[0] - 1
    coeffs = np.zeros((N, p, p), dtype=complex)
    # node i is at lambda = -pi + 2 pi (i+1)/N, so e^{-ih lam} = (-1)^h e^{-2 pi i h (i+1)/N}
    sign = np.where(np.arange(H + 1) % 2, -1.0, 1.0)
    for h in range(H + 1):
        c = w[h] * sign[h] * G[h]
        coeffs[h % N] += c
        if h:
            coeffs[(-h) % N] += c.T
    spec = np.fft.fft(coeffs, axis=0)
    return np.roll(spec, -1, axis=0) / (2.0 * np.pi)


def field_from_config(x: MultiSeries, config) -> SpectralField:
    """Estimate a field using an :class:`~resspec.core.EstimationConfig`."""
    M = config.bandwidth if config.bandwidth is not None else default_bandwidth(
        x.n_eff, config.bandwidth_const)
    return estimate_spectral_field(x, config.lag_window(), int(M), config.grid())


def analytic_field(grid: FrequencyGrid, fn, bandwidth: int = 2, window: str = "analytic") -> SpectralField:
    """Wrap a known spectral-matrix function ``fn(lam) -> (p, p)`` as a field.

    Used to evaluate downstream functionals on exact population spectra.
    """
    mats = np.stack([np.asarray(fn(lam), dtype=complex) for lam in grid.frequencies])
    return SpectralField(grid, _hermitize(mats), bandwidth, window)
