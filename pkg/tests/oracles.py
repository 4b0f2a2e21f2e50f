"""Independent dense constructions used as test oracles.

Nothing here calls the matrix-free code paths: DFT matrices come from the
closed-form kernel, wavelet matrices from explicit filter loops.
"""

import numpy as np

from drifg.wavelets import filters


def dft_matrix(n):
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def selection(bins, n):
    s = np.zeros((len(bins), n))
    s[np.arange(len(bins)), list(bins)] = 1.0
    return s


def axis_operator(bins, n):
    """F_m^* Omega F_n for one axis."""
    m = len(bins)
    return dft_matrix(m).conj().T @ selection(bins, n) @ dft_matrix(n)


def dense_forward(theta, band):
    """(C kron R) diag(vec theta), column-major vec."""
    n, l = band.full_dims
    r = axis_operator(band.row_bins, n)
    c = axis_operator(band.col_bins, l)
    return np.kron(c, r) @ np.diag(theta.ravel(order="F"))


def periodic_analysis_matrix(n, family):
    """One-level 1-D periodic analysis: rows 0..n/2-1 lowpass, then highpass."""
    lo, hi = filters(family)
    t = np.zeros((n, n))
    for k in range(n // 2):
        for m in range(len(lo)):
            t[k, (2 * k + m) % n] += lo[m]
            t[n // 2 + k, (2 * k + m) % n] += hi[m]
    return t


def dense_wavelet_analysis(shape, family, levels):
    """Matrix of the multi-level 2-D Mallat analysis on column-major vec."""
    rows, cols = shape
    size = rows * cols
    out = np.empty((size, size))
    for j in range(size):
        e = np.zeros(size)
        e[j] = 1.0
        x = e.reshape(shape, order="F")
        r, c = rows, cols
        for _ in range(levels):
            x[:r, :c] = periodic_analysis_matrix(r, family) @ x[:r, :c] @ periodic_analysis_matrix(c, family).T
            r, c = r // 2, c // 2
        out[:, j] = x.ravel(order="F")
    return out


def dense_sensing(theta, band, family, levels):
    w = dense_wavelet_analysis(band.full_dims, family, levels).T
    return dense_forward(theta, band) @ w


def dense_proximal_gradient(a, z, lam, iters=10_000):
    """ISTA on ||z - A x||^2 + lam ||x||_1 with step 1/(2 ||A||^2)."""
    lip = 2 * np.linalg.norm(a, 2) ** 2
    x = np.zeros(a.shape[1], dtype=complex)
    for _ in range(iters):
        v = x - (2 / lip) * (a.conj().T @ (a @ x - z))
        mag = np.abs(v)
        tau = lam / lip
        x = v * np.where(mag > tau, 1 - tau / np.maximum(mag, 1e-300), 0.0)
    return x


def dense_fista(a, z, lam, iters=10_000):
    """Accelerated variant of :func:`dense_proximal_gradient`, same step."""
    lip = 2 * np.linalg.norm(a, 2) ** 2
    x = np.zeros(a.shape[1], dtype=complex)
    y, t = x, 1.0
    for _ in range(iters):
        v = y - (2 / lip) * (a.conj().T @ (a @ y - z))
        mag = np.abs(v)
        tau = lam / lip
        x_new = v * np.where(mag > tau, 1 - tau / np.maximum(mag, 1e-300), 0.0)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        y = x_new + (t - 1) / t_new * (x_new - x)
        x, t = x_new, t_new
    return x


def dense_objective(a, x, z, lam):
    r = a @ x - z
    return float(np.vdot(r, r).real + lam * np.abs(x).sum())


def itoh_unwrap_1d(p):
    d = np.diff(p)
    d = np.angle(np.exp(1j * d))
    return np.concatenate([[p[0]], p[0] + np.cumsum(d)])
