"""Independent oracles and input builders shared by the test modules."""

import numpy as np

from resspec.core import make_grid
from resspec.spectral import SpectralField, analytic_field


def random_hpd(rng, p, N=1, ridge=0.5):
    """Stack of ``N`` random Hermitian positive definite ``p x p`` matrices."""
    X = rng.standard_normal((N, p, p)) + 1j * rng.standard_normal((N, p, p))
    return X @ np.conj(np.swapaxes(X, 1, 2)) + ridge * np.eye(p)


def random_field(rng, p, N=64):
    return SpectralField(make_grid(N), random_hpd(rng, p, N), 2, "parzen")


def laplace_det(m):
    """Determinant by cofactor expansion along the first row (small matrices only)."""
    n = m.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return m[0, 0]
    total = 0.0
    for c in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), c, axis=1)
        total += (-1) ** c * m[0, c] * laplace_det(minor)
    return total


def phi_holomorphic(Z, K):
    """Literal numerator formula with ``conj(z_ab)`` replaced by ``z_ba``.

    Agrees with the package's ``phi_K`` on Hermitian input but is a
    polynomial in the entries of an arbitrary complex ``Z``, so it can be
    differentiated by finite differences.
    """
    if K == 1:
        return Z[1, 0]
    F = Z[1:K, 1:K]
    total = laplace_det(F) * Z[K, 0]
    for i in range(K - 1):
        # conj of the matrix with column i replaced by (f_1K..f_{K-1,K})
        C = np.empty((K - 1, K - 1), dtype=complex)
        for a in range(K - 1):
            for b in range(K - 1):
                C[a, b] = Z[K, a + 1] if b == i else Z[b + 1, a + 1]
        total -= laplace_det(C) * Z[i + 1, 0]
    return total


def fd_gradient(fun, Z, step=1e-6):
    """Central differences of a holomorphic scalar function of a matrix."""
    G = np.zeros_like(Z, dtype=complex)
    h = step * max(1.0, np.max(np.abs(Z)))
    for r in range(Z.shape[0]):
        for c in range(Z.shape[1]):
            E = np.zeros_like(Z, dtype=complex)
            E[r, c] = h
            G[r, c] = (fun(Z + E) - fun(Z - E)) / (2 * h)
    return G


def linear_process_field(coefs, sigma=None, N=256, bandwidth=2):
    """Exact spectrum of ``X(t) = sum_k Psi_k e(t-k)`` with ``Var e = sigma``.

    ``coefs`` is a list of real ``p x q`` matrices ``Psi_0, Psi_1, ...``.
    """
    coefs = [np.asarray(c, dtype=float) for c in coefs]
    q = coefs[0].shape[1]
    sigma = np.eye(q) if sigma is None else np.asarray(sigma, dtype=float)

    def fn(lam):
        psi = sum(c * np.exp(-1j * k * lam) for k, c in enumerate(coefs))
        return psi @ sigma @ psi.conj().T / (2 * np.pi)

    return analytic_field(make_grid(N), fn, bandwidth=bandwidth, window="parzen")


def null_field(rng, K, N=256, taps=3):
    """Exact spectrum where ``X_K`` has no residual spectrum given ``X1..X_{K-1}``.

    ``X1..X_{K-1}`` and ``X_K`` share innovations (so the covariates are
    correlated) but ``X0`` only loads on ``X1..X_{K-1}`` plus its own noise.
    """
    q = K + 1  # innovations: e0, e1..e_{K-1}, eK
    coefs = []
    for k in range(taps):
        C = np.zeros((K + 1, q))
        scale = 0.6 ** k
        # covariates 1..K-1 from e1..e_{K-1} (and eK keeps X_K distinct)
        C[1:K, 1:K] = scale * rng.standard_normal((K - 1, K - 1))
        C[K, 1:K] = scale * rng.standard_normal(K - 1)
        C[K, K] = scale * (1.0 + rng.random())
        coefs.append(C)
    coefs[0][1:K, 1:K] += 2.0 * np.eye(K - 1)
    # X0 = sum_k B_k X_{1..K-1}(t-k) + e0
    B = [rng.standard_normal(K - 1) * 0.5 ** k for k in range(2)]
    out = [np.zeros((K + 1, q)) for _ in range(taps + 1)]
    for k, C in enumerate(coefs):
        out[k][1:] += C[1:]
        for lag, b in enumerate(B):
            out[k + lag][0] += b @ C[1:K]
    out[0][0, 0] += 1.0
    return linear_process_field(out, N=N)


def ar1_spectrum(lam, phi=0.4, s2=1.0):
    return s2 / (2 * np.pi * np.abs(1 - phi * np.exp(-1j * lam)) ** 2)


def solve_oracle(f, d):
    """Transfer functions of order ``d`` from the normal equations (no determinants)."""
    if d == 1:
        return (f[:, 1, 0] / f[:, 1, 1])[:, None]
    F = f[:, 1:d, 1:d]
    v = f[:, 1:d, d]
    w = f[:, 1:d, 0]
    Fv = np.linalg.solve(F, v[..., None])[..., 0]
    Fw = np.linalg.solve(F, w[..., None])[..., 0]
    add = (f[:, d, 0] - np.einsum("ni,ni->n", v.conj(), Fw)) / (
        f[:, d, d] - np.einsum("ni,ni->n", v.conj(), Fv))
    return np.concatenate([-add[:, None] * Fv, add[:, None]], axis=1)
