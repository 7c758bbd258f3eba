"""Orthogonal decomposition of a time-series regression in the frequency domain.

For the response ``X0`` and covariates ``X1..XK`` the response splits into
mutually orthogonal components ``G_1..G_K`` where ``G_j`` only uses
``X1..Xj``.  Transfer functions are stored as values of ``A_jd(e^{i lam})``
on the grid, so that ``A_11 = f_10 / f_11`` and a filter putting weight
``a(k)`` on ``X_d(t - k)`` appears as ``sum_k a(k) e^{i k lam}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidArgumentError, NumericalConsistencyError, SingularSpectrumError
from .spectral import SpectralField

COND_LIMIT = 1e12
IMAG_TOL = 1e-8


@dataclass(frozen=True)
class Decomposition:
    """Transfer functions, residual spectra and coherences on a grid.

    Attributes
    ----------
    transfer : ndarray, shape (K, K, N)
        ``transfer[j-1, d-1]`` holds ``A_jd``; entries with ``d > j`` are zero.
    residual_spectra : ndarray, shape (K, N)
        ``f_{G_j G_j}``, clamped at zero.
    coherence : ndarray, shape (K, N)
        Squared coherence of order ``d``, clamped to ``[0, 1]``.
    f00 : ndarray, shape (N,)
        Auto-spectrum of the response.
    """

    grid: object
    transfer: np.ndarray
    residual_spectra: np.ndarray
    coherence: np.ndarray
    f00: np.ndarray

    @property
    def K(self) -> int:
        return self.transfer.shape[0]

    def A(self, j: int, d: int) -> np.ndarray:
        if not 1 <= d <= j <= self.K:
            raise InvalidArgumentError(f"need 1 <= d <= j <= K, got j={j}, d={d}")
        return self.transfer[j - 1, d - 1]


def det(stack: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices (LU with partial pivoting)."""
    if stack.shape[-1] == 0:
        return np.ones(stack.shape[:-2], dtype=stack.dtype)
    return np.linalg.det(stack)


def leading_block(f: np.ndarray, j: int) -> np.ndarray:
    """Covariate block ``f_j = (f_ab)_{a,b=1..j}`` at every node."""
    return f[:, 1:j + 1, 1:j + 1]


def dagger_block(f: np.ndarray, j: int) -> np.ndarray:
    """``f_ddag_{i,j}`` for ``i = 1..j-1`` stacked on axis 1.

    Copy of ``f_{j-1}`` with column ``i`` replaced by ``(f_1j, ..., f_{j-1,j})``.
    Shape ``(N, j-1, j-1, j-1)``.
    """
    base = leading_block(f, j - 1)
    col = f[:, 1:j, j]
    out = np.repeat(base[:, None], j - 1, axis=1)
    for i in range(j - 1):
        out[:, i, :, i] = col
    return out


def check_conditioning(field: SpectralField, upto: int = None, limit: float = COND_LIMIT):
    """Raise if any covariate block ``f_j`` (``j <= upto``) is ill-conditioned."""
    f = field.matrices
    upto = field.K if upto is None else upto
    for j in range(1, upto + 1):
        block = leading_block(f, j)
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(block)
        bad = ~np.isfinite(cond) | (cond > limit)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            lam = float(field.grid.frequencies[i])
            raise SingularSpectrumError(
                f"covariate spectral block of order {j} is singular at frequency "
                f"{lam:.6f} (condition number {cond[i]:.3g})", frequency=lam)


def phi_numerator(f: np.ndarray, j: int) -> np.ndarray:
    """``-sum_i det(conj f_ddag_{i,j}) f_i0 + det(f_{j-1}) f_j0`` at every node."""
    if j == 1:
        return f[:, 1, 0].copy()
    total = det(leading_block(f, j - 1)) * f[:, j, 0]
    dag = np.conj(dagger_block(f, j))
    for i in range(j - 1):
        total = total - det(dag[:, i]) * f[:, i + 1, 0]
    return total


def phi_K(field: SpectralField) -> np.ndarray:
    """Numerator of ``A_KK``; zero on the whole grid iff the order-K residual spectrum is."""
    if field.K < 1:
        raise InvalidArgumentError("phi_K needs at least one covariate")
    return phi_numerator(field.matrices, field.K)


def transfer_functions(field: SpectralField, check: bool = True) -> np.ndarray:
    """Transfer functions ``A_jd`` as an array of shape ``(K, K, N)``."""
    f = field.matrices
    K = field.K
    if K < 1:
        raise InvalidArgumentError("decomposition needs at least one covariate")
    if check:
        check_conditioning(field)
    N = f.shape[0]
    A = np.zeros((K, K, N), dtype=complex)
    for j in range(1, K + 1):
        det_j = det(leading_block(f, j))
        A[j - 1, j - 1] = phi_numerator(f, j) / det_j
        if j > 1:
            det_prev = det(leading_block(f, j - 1))
            dag = dagger_block(f, j)
            for d in range(1, j):
                A[j - 1, d - 1] = -det(dag[:, d - 1]) / det_prev * A[j - 1, j - 1]
    return A


def _real_part(z: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(z)))) if z.size else 1.0
    if z.size and np.max(np.abs(z.imag)) > IMAG_TOL * scale:
        raise NumericalConsistencyError(
            f"{what} has imaginary residue {np.max(np.abs(z.imag)):.3g}")
    return z.real.copy()


def residual_spectra(field: SpectralField, transfer: np.ndarray) -> np.ndarray:
    """``f_{G_j G_j} = |A_jj|^2 det(f_j) / det(f_{j-1})``, shape ``(K, N)``."""
    f = field.matrices
    K = transfer.shape[0]
    out = np.empty((K, f.shape[0]))
    prev = np.ones(f.shape[0], dtype=complex)
    for j in range(1, K + 1):
        cur = det(leading_block(f, j))
        ratio = _real_part(cur / prev, f"det ratio of order {j}")
        out[j - 1] = np.abs(transfer[j - 1, j - 1]) ** 2 * ratio
        prev = cur
    if np.any(out < -1e-10 * max(1.0, float(np.max(np.abs(out))))):
        raise NumericalConsistencyError("negative residual spectrum")
    return np.maximum(out, 0.0)


def coherence_of_order(field: SpectralField, dec: Decomposition, d: int) -> np.ndarray:
    """Squared coherence of order ``d``: ``sum_{i<=d} f_{G_i G_i} / f_00``."""
    if not 1 <= d <= dec.K:
        raise InvalidArgumentError(f"order d must be in 1..{dec.K}")
    return dec.coherence[d - 1]


def _coherences(f00: np.ndarray, spectra: np.ndarray) -> np.ndarray:
    return np.clip(np.cumsum(spectra, axis=0) / f00[None, :], 0.0, 1.0)


def decompose(field: SpectralField, check: bool = True) -> Decomposition:
    """Full decomposition of ``field`` (covariates in column order)."""
    A = transfer_functions(field, check=check)
    spectra = residual_spectra(field, A)
    f00 = _real_part(field.matrices[:, 0, 0], "f_00")
    return Decomposition(field.grid, A, spectra, _coherences(f00, spectra), f00)


def filter_coefficients(dec: Decomposition, j: int, d: int, k_range: Iterable[int]) -> np.ndarray:
    """Filter weights ``a_jd(k)`` by inverse DFT of ``A_jd`` over the grid.

    ``a_jd(k)`` multiplies ``X_d(t - k)`` inside ``G_j``.
    """
    A = dec.A(j, d)
    lam = dec.grid.frequencies
    ks = np.asarray(list(k_range), dtype=float)
    coef = (np.exp(-1j * np.outer(ks, lam)) @ A) / lam.shape[0]
    return _real_part(coef, f"filter a_{j}{d}")


def regression_coefficients(dec: Decomposition, i: int, k_range: Iterable[int]) -> np.ndarray:
    """``b_i(k) = sum_{j=i..K} a_ji(k)``: the coefficient on ``X_i(t - k)``."""
    if not 1 <= i <= dec.K:
        raise InvalidArgumentError(f"covariate index must be in 1..{dec.K}")
    ks = list(k_range)
    return sum(filter_coefficients(dec, j, i, ks) for j in range(i, dec.K + 1))


def phi_index_sets(K: int):
    """Rows/columns of the ``K x K`` matrix whose determinant is ``phi_K``.

    Treating ``conj(f_ab)`` as ``f_ba``, ``phi_K`` is the determinant of
    ``f`` restricted to rows ``1..K`` and columns ``1..K-1, 0``.
    """
    return list(range(1, K + 1)), list(range(1, K)) + [0]


def cofactors(stack: np.ndarray) -> np.ndarray:
    """Cofactor matrices of a stack of square matrices (valid when singular)."""
    n = stack.shape[-1]
    out = np.empty_like(stack)
    if n == 1:
        out[...] = 1.0
        return out
    idx = np.arange(n)
    for r in range(n):
        rows = idx[idx != r]
        for c in range(n):
            cols = idx[idx != c]
            minor = stack[..., rows[:, None], cols[None, :]]
            out[..., r, c] = (-1) ** (r + c) * det(minor)
    return out


def phi_gradient(f: np.ndarray, rows, cols) -> np.ndarray:
    """Holomorphic gradient ``d phi / dZ`` of ``phi = det(Z[rows, cols])``.

    By Jacobi's formula the derivative with respect to ``Z[rows[r], cols[c]]``
    is the ``(r, c)`` cofactor; every other entry of ``Z`` has zero derivative.
    Returns shape ``(N, p, p)``.
    """
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    cof = cofactors(f[:, rows[:, None], cols[None, :]])
    D = np.zeros_like(f)
    D[:, rows[:, None], cols[None, :]] = cof
    return D
