"""Orthonormal 2-D separable wavelet transform with periodic boundaries.

Coefficients use the usual Mallat layout: after each level the approximation
band sits in the top-left quadrant of the current block and the three detail
bands fill the remaining quadrants.  Complex inputs are transformed through
their real and imaginary parts independently, which is what a real
orthonormal basis does to a complex vector anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numpy as np

# Decomposition lowpass filters (orthonormal, sum = sqrt(2)).
_DEC_LO = {
    "haar": np.array([0.7071067811865476, 0.7071067811865476]),
    "db2": np.array([1 - np.sqrt(3), 3 - np.sqrt(3), 3 + np.sqrt(3), 1 + np.sqrt(3)])
    / (4 * np.sqrt(2)),
    "db4": np.array([
        -0.010597401785069032,
        0.032883011666885200,
        0.030841381835560764,
        -0.18703481171909308,
        -0.027983769416859854,
        0.63088076792985891,
        0.71484657055291565,
        0.23037781330889650,
    ]),
}
_ALIASES = {"db1": "haar", "daubechies-4": "db4", "d4": "db2"}

WAVELET_FAMILIES = tuple(sorted(_DEC_LO))


def filters(family: str) -> tuple[np.ndarray, np.ndarray]:
    """Return the (lowpass, highpass) analysis filter pair for ``family``."""
    key = _ALIASES.get(family.lower(), family.lower())
    try:
        lo = _DEC_LO[key]
    except KeyError:
        raise ValueError(
            f"unknown wavelet family {family!r}; choose from {WAVELET_FAMILIES}"
        ) from None
    # quadrature mirror: g[m] = (-1)^m h[L-1-m]
    hi = lo[::-1] * (-1.0) ** np.arange(len(lo))
    return lo, hi


@dataclass(frozen=True)
class WaveletConfig:
    family: str = "db4"
    levels: int = 4
    boundary: str = "periodic"

    def __post_init__(self):
        filters(self.family)
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be a positive integer, got {self.levels}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")

    def check_shape(self, shape: tuple[int, int]) -> None:
        """Raise ``ValueError`` unless an image of ``shape`` can be decomposed."""
        rows, cols = shape
        step = 2 ** self.levels
        if rows % step or cols % step:
            raise ValueError(
                f"image {rows}x{cols} is not divisible by 2**levels = {step}"
            )
        cap = int(log2(min(rows, cols))) - 2
        if self.levels > cap:
            raise ValueError(
                f"levels={self.levels} too deep for {rows}x{cols}; at most {max(cap, 0)}"
            )


def _analysis_1d(x, lo, hi, axis):
    n = x.shape[axis]
    a = np.zeros_like(np.take(x, np.arange(0, n, 2), axis=axis))
    d = np.zeros_like(a)
    for m in range(len(lo)):
        # x[(2k + m) mod n] for k = 0..n/2-1
        shifted = np.take(x, (np.arange(0, n, 2) + m) % n, axis=axis)
        a += lo[m] * shifted
        d += hi[m] * shifted
    return a, d


def _synthesis_1d(a, d, lo, hi, axis):
    half = a.shape[axis]
    n = 2 * half
    shape = list(a.shape)
    shape[axis] = n
    x = np.zeros(shape, dtype=np.result_type(a, d))
    base = np.arange(0, n, 2)
    for m in range(len(lo)):
        idx = (base + m) % n
        contrib = lo[m] * a + hi[m] * d
        # idx is a permutation of one residue class, so no collisions per tap
        sl = [slice(None)] * x.ndim
        sl[axis] = idx
        x[tuple(sl)] += contrib
    return x


def _forward_real(img, cfg):
    lo, hi = filters(cfg.family)
    out = np.array(img, dtype=np.float64, copy=True)
    r, c = out.shape
    for _ in range(cfg.levels):
        block = out[:r, :c]
        a, d = _analysis_1d(block, lo, hi, axis=0)
        block = np.concatenate([a, d], axis=0)
        a, d = _analysis_1d(block, lo, hi, axis=1)
        out[:r, :c] = np.concatenate([a, d], axis=1)
        r, c = r // 2, c // 2
    return out


def _inverse_real(coeffs, cfg):
    lo, hi = filters(cfg.family)
    out = np.array(coeffs, dtype=np.float64, copy=True)
    rows, cols = out.shape
    for level in reversed(range(cfg.levels)):
        r, c = rows >> level, cols >> level
        block = out[:r, :c]
        block = _synthesis_1d(block[:, : c // 2], block[:, c // 2 :], lo, hi, axis=1)
        block = _synthesis_1d(block[: r // 2], block[r // 2 :], lo, hi, axis=0)
        out[:r, :c] = block
    return out


def wavelet_analysis(u: np.ndarray, cfg: WaveletConfig) -> np.ndarray:
    """Image -> subband-ordered coefficients (the adjoint of synthesis)."""
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {u.shape}")
    cfg.check_shape(u.shape)
    if np.iscomplexobj(u):
        return _forward_real(u.real, cfg) + 1j * _forward_real(u.imag, cfg)
    return _forward_real(u, cfg)


def wavelet_synthesis(x: np.ndarray, cfg: WaveletConfig) -> np.ndarray:
    """Subband-ordered coefficients -> image."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError(f"expected 2-D coefficients, got shape {x.shape}")
    cfg.check_shape(x.shape)
    if np.iscomplexobj(x):
        return _inverse_real(x.real, cfg) + 1j * _inverse_real(x.imag, cfg)
    return _inverse_real(x, cfg)


def subband_slices(shape: tuple[int, int], levels: int) -> dict[str, tuple[slice, slice]]:
    """Map subband names (``"A"``, ``"H1"``, ``"V1"``, ``"D1"``, ...) to slices.

    Level 1 is the finest scale.  ``H`` holds row-lowpass/column-highpass
    coefficients, ``V`` the transpose and ``D`` the diagonal band.
    """
    rows, cols = shape
    out = {}
    for level in range(1, levels + 1):
        r, c = rows >> level, cols >> level
        out[f"H{level}"] = (slice(0, r), slice(c, 2 * c))
        out[f"V{level}"] = (slice(r, 2 * r), slice(0, c))
        out[f"D{level}"] = (slice(r, 2 * r), slice(c, 2 * c))
    out["A"] = (slice(0, rows >> levels), slice(0, cols >> levels))
    return out
